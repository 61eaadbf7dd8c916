"""Numeric Gauss sums against the exact algebraic route, side by side.

For a spread of quadratic forms and character levels the stabilized
character sum lands on a fourth root of unity; the algebraic route gets
the same value from the Wall pair without ever summing anything.
"""

from weilgamma import (
    AdditiveCharacter,
    gamma_oracle,
    parse_field,
    square_class_group,
    wall_pair,
    weil_index,
)

for desc in ("Qp:3", "Qp:5", "Qp:2", "Fq((t)):3"):
    F = parse_field(desc)
    pi = next(c for c in square_class_group(F) if c.vbit).rep_element()
    if F.residue_char == 2:
        a = b = F(-1)  # the division quaternions over the dyadic field
    else:
        a = next(c for c in square_class_group(F)
                 if not c.vbit and not c.is_one()).rep_element()
        b = pi
    forms = {
        "unit plane": [F(1), F(-1)],
        "ramified norm": [F(1), F(-1) * pi],
        "division quaternion": [F(1), F(-1) * a, F(-1) * b, a * b],
    }
    print(f"\n== {desc} ==")
    for name, diag in forms.items():
        for level in (-1, 0, 1):
            psi = AdditiveCharacter(F, level=level)
            exact = weil_index(wall_pair(F, diag), psi)
            phase = gamma_oracle(F, diag, psi)
            residual = abs(phase - exact.value())
            print(f"  {name:18s} psi level {level:+d}: "
                  f"algebraic {str(exact):>2s}, "
                  f"numeric {phase.real:+.6f}{phase.imag:+.6f}i, "
                  f"residual {residual:.1e}")
