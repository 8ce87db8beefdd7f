"""Independent reference values for the unit annulus ``rho = (1, 2)`` with ``B = 1``.

Everything here comes from the closed form
``phi(r) = r^2/4 - (3/(4 ln 2)) ln r - 1/4``, written out without using the
package.
"""

import math

RHO1, RHO2 = 1.0, 2.0
LN2 = math.log(2.0)


def phi_exact(r):
    return r * r / 4.0 - 3.0 / (4.0 * LN2) * math.log(r) - 0.25


def dphi_exact(r):
    return r / 2.0 - 3.0 / (4.0 * LN2 * r)


R_MIN = math.sqrt(3.0 / (2.0 * LN2))              # 1.471068510074716
PHI_MIN = phi_exact(R_MIN)                         # -0.12663768729140895
DN_INNER = -dphi_exact(RHO1)                       # 0.5820212806667227
DN_OUTER = dphi_exact(RHO2)                        # 0.4589893596666387
CURVATURE = 1.0

# frozen copies, guarding the formulas above against edits
FROZEN = {
    "r_min": 1.471068510074716,
    "phi_min": -0.12663768729140895,
    "dn_inner": 0.5820212806667227,
    "dn_outer": 0.4589893596666387,
    "f0": 1.1505709890814688,
    "f_minus1": 1.3470540565045002,
    "f_plus1": 1.5078124679714902,
    "phi_1_25": -0.1008210711655218,
    "c0_symmetric": -1.0820212806667227,
}


def f_exact(x):
    q1, q2 = RHO1 / R_MIN, RHO2 / R_MIN
    e = 2.0 * x + 1.0
    return 2.0 * math.sqrt(CURVATURE / math.pi) * (DN_INNER * q1**e + DN_OUTER * q2**e)


def c0_symmetric():
    # disc flux of B = 1 is pi rho1^2; c0 = rho1 phi'(rho1) - circ/(2 pi)
    return RHO1 * dphi_exact(RHO1) - math.pi * RHO1**2 / (2.0 * math.pi)


def laplacian_eigs(n_intervals, js):
    dr = 1.0 / n_intervals
    return [(2.0 / dr**2) * (1.0 - math.cos(j * math.pi * dr)) for j in js]
