"""Where the printed equations and the measurement map disagree."""
from qutrit_zeno.hamilton_flow import divergence_report

for mode in ("single", "double"):
    rep = divergence_report(mode, n_samples=300, seed=0)
    print(rep.to_text())
    print()
    for section in ("drift", "momentum", "momentum_vs_map"):
        print(f"{mode} {section}: divergent lines {rep.divergent_lines(section)}")
    print()
