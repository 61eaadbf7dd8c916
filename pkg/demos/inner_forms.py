"""The two-torsion corrections of one torus realize different inner forms.

A resolved cocycle is only determined up to corrections valued in the
two-torsion of the torus.  The Weyl data is shared, but the descended
root-space form is not: its Weil index flips sign between the two inner
forms, while the character-side invariant never moves.  Selecting the
correction whose assembled Lie form matches the split form pins the
quasi-split representative; asking for the other sign either finds the
nontrivial inner form or proves there is none.
"""

from weilgamma import (
    AdditiveCharacter,
    Obstructed,
    descend_quadspace,
    eps_virtual,
    galois_frame,
    inner_form_defect,
    parse_field,
    pattern_variants,
    resolve_cocycle,
    select_inner_form,
    split_form,
    sw_virtual,
    wall_pair,
    weil_index,
)

for desc in ("Qp:3", "Qp:5"):
    F = parse_field(desc)
    frame = galois_frame(F, e=2)
    td = resolve_cocycle(frame, "C2", w={"tau": (0, 1, 0, 1)})
    base = split_form(td)
    psi = AdditiveCharacter(F)
    rhs = eps_virtual(sw_virtual(td, base), psi)

    print(f"\n== {desc}: ramified C2 torus at the long Weyl element ==")
    print(f"character side (correction independent): {rhs!r}")
    for k, v in enumerate(pattern_variants(td)):
        defect = inner_form_defect(v, base)
        gamma = weil_index(wall_pair(F, descend_quadspace(v, "V").diag), psi)
        sign = "+1" if gamma == rhs else "-1"
        print(f"  correction {k}: defect {defect}, gamma {gamma!r}, "
              f"inner sign {sign}")

    for sign in (1, -1):
        try:
            sel = select_inner_form(td, base, sign)
            gamma = weil_index(
                wall_pair(F, descend_quadspace(sel, "V").diag), psi)
            print(f"  select sign {sign:+d}: gamma {gamma!r}")
        except Obstructed as exc:
            print(f"  select sign {sign:+d}: obstructed ({exc})")
