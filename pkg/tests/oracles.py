"""Independent oracles shared across test modules.

Everything here is deliberately naive and self-contained: series
convolution instead of partition enumeration, direct surface localization
instead of Hilbert-scheme machinery.  The tests compare the engine against
these implementations, so they must not import from the modules they check
beyond plain data access.
"""

from fractions import Fraction
from math import comb


def euler_product_coefficients(chi_top: int, k_max: int) -> list[int]:
    """Coefficients of prod_{m >= 1} (1 - q^m)^(-chi_top), by convolution.

    Each factor contributes the negative-binomial series
    sum_j C(chi_top - 1 + j, j) q^(m j).
    """
    coeffs = [1] + [0] * k_max
    for m in range(1, k_max + 1):
        factor = [comb(chi_top - 1 + j, j) for j in range(k_max // m + 1)]
        out = [0] * (k_max + 1)
        for n, c in enumerate(coeffs):
            if c == 0:
                continue
            for j, f in enumerate(factor):
                if n + m * j > k_max:
                    break
                out[n + m * j] += c * f
        coeffs = out
    return coeffs


def c2_by_surface_localization(surface, bundle) -> int:
    """Integrate c2 of an honest split bundle over the surface directly.

    The second elementary symmetric function of the fixed-point weights,
    divided by the tangent weights, summed over the surface's fixed points;
    no Hilbert scheme involved.  Evaluated at two numeric points as a
    consistency check.
    """
    assert bundle.is_honest()
    results = []
    for z in ((7, 3), (5, 11)):
        total = Fraction(0)
        for p, (v1, v2) in enumerate(surface.points):
            ws = [l.weights[p].spec_int(*z) for l in bundle.plus]
            e2 = sum(
                ws[i] * ws[j]
                for i in range(len(ws))
                for j in range(i + 1, len(ws))
            )
            total += Fraction(e2, v1.spec_int(*z) * v2.spec_int(*z))
        assert total.denominator == 1
        results.append(int(total))
    assert results[0] == results[1]
    return results[0]
