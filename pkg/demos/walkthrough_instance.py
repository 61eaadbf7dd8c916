"""Walk one verification instance through both pipelines, stage by stage.

The instance is the ramified quadratic torus of the rank-two symplectic
type over Q3, sent to the long Weyl element.  Each printed stage shows
the data the next one consumes, ending with the two independently
computed fourth roots of unity.
"""

from weilgamma import (
    AdditiveCharacter,
    InstanceSpec,
    descend_quadspace,
    eps_virtual,
    galois_frame,
    gamma_oracle,
    inner_form_defect,
    parse_field,
    pattern_variants,
    resolve_cocycle,
    select_inner_form,
    split_form,
    sw_bar,
    sw_virtual,
    verify_main_theorem,
    wall_pair,
    weil_index,
)

F = parse_field("Qp:3")
print(f"ground field        {F.descriptor} (residue char {F.residue_char})")

frame = galois_frame(F, e=2)
print(f"splitting frame     ramified quadratic, group order {frame.n}")

td_raw = resolve_cocycle(frame, "C2", w={"tau": (0, 1, 0, 1)})
base = split_form(td_raw)
print(f"resolved torus      {td_raw!r}")
print(f"pattern freedom     {len(pattern_variants(td_raw))} two-torsion corrections")

td = select_inner_form(td_raw, base, 1)
print(f"selected correction {dict(td.patterns)}")
print(f"inner form defect   {inner_form_defect(td, base)} (trivial: ambient form fixed)")

dv = descend_quadspace(td, "V")
print(f"\nroot-space block    dim {dv.dim}, diagonal {[repr(x) for x in dv.diag]}")

psi = AdditiveCharacter(F)
gamma = weil_index(wall_pair(F, dv.diag), psi)
print(f"Weil index          gamma(Q_V, psi) = {gamma!r}")

phase = gamma_oracle(F, dv.diag, psi)
print(f"Gauss oracle        stabilized phase {phase:.6f} "
      f"(residual {abs(phase - gamma.value()):.1e})")

pair = sw_virtual(td, base)
print(f"\nparameter side      SW pair of T: {sw_bar(td)}, of T0: {sw_bar(base)}")
print(f"virtual difference  {pair}")
eps = eps_virtual(pair, psi)
print(f"epsilon factor      {eps!r}")

print(f"\nidentity            {gamma!r} == {eps!r}: {gamma == eps}")

report = verify_main_theorem(InstanceSpec(
    field="Qp:3", cartan_type="C2", frame_e=2, w={"tau": (0, 1, 0, 1)},
    intermediates=True))
print(f"harness verdict     {report.verdict}")
for name in sorted(report.intermediates):
    print(f"  intermediate      {name}: {'ok' if report.intermediates[name] else 'FAIL'}")
