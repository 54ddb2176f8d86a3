"""Generate rb_hyperfine.json: hyperfine-resolved Rb D1/D2 lines.

Each isotope/ground-level/excited-level component gets
    strength = s_D * abundance * (2F+1)/(2(2I+1)) * S_FF'
with each S_FF' row normalized to 1, so the components of each
fine-structure line sum to the effective strength
of the two-line catalog.  Centers are the D-line centroids plus hyperfine
shifts (excited shift minus ground shift).
"""
import json
import math

C = 299792458.0
GAMMA = 2 * math.pi * 6e6
S_D1, S_D2 = 2.25e-13, 4.58e-13

# isotope: abundance, nuclear spin, ground shifts (Hz) by F
ISOTOPES = {
    "85Rb": (0.7217, 2.5, {2: -1.7708439228e9, 3: 1.2648885163e9}),
    "87Rb": (0.2783, 1.5, {1: -4.271676631815e9, 2: 2.563005979089e9}),
}

# (isotope, line): centroid wavelength nm, excited shifts by F', relative strengths S[F][F']
LINES = {
    ("85Rb", "D1"): (794.979014933, {2: -210.923e6, 3: 150.659e6},
                     {2: {2: 1 / 3, 3: 2 / 3}, 3: {2: 5 / 9, 3: 4 / 9}}),
    ("87Rb", "D1"): (794.978851156, {1: -510.410e6, 2: 306.246e6},
                     {1: {1: 1 / 6, 2: 5 / 6}, 2: {1: 1 / 2, 2: 1 / 2}}),
    ("85Rb", "D2"): (780.241368271,
                     {1: -113.208e6, 2: -83.835e6, 3: -20.435e6, 4: 100.205e6},
                     {2: {1: 10 / 27, 2: 35 / 81, 3: 7 / 27},
                      3: {2: 5 / 63, 3: 5 / 18, 4: 9 / 14}}),
    ("87Rb", "D2"): (780.241209686,
                     {0: -302.0738e6, 1: -229.8518e6, 2: -72.9112e6, 3: 193.7407e6},
                     {1: {0: 1 / 6, 1: 5 / 12, 2: 5 / 12},
                      2: {1: 1 / 20, 2: 1 / 4, 3: 7 / 10}}),
}


def main():
    lines = []
    for (iso, name), (centroid_nm, excited, strengths) in LINES.items():
        abundance, spin, ground = ISOTOPES[iso]
        s_eff = S_D1 if name == "D1" else S_D2
        nu0 = C / (centroid_nm * 1e-9)
        for f, row in strengths.items():
            weight = (2 * f + 1) / (2 * (2 * spin + 1))
            total = sum(row.values())  # rows are normalized to unit total strength
            for fp, rel in row.items():
                rel /= total
                nu = nu0 + excited[fp] - ground[f]
                lines.append({
                    "name": f"{iso} {name} F={f}->F'={fp}",
                    "angular_frequency": 2 * math.pi * nu,
                    "strength": s_eff * abundance * weight * rel,
                    "linewidth": GAMMA,
                })
    with open("rb_two_line.json") as f:
        density = json.load(f)["density_model"]
    doc = {"label": "Rb D1/D2 hyperfine-resolved (85Rb + 87Rb)", "lines": lines,
           "density_model": density}
    with open("rb_hyperfine.json", "w") as f:
        json.dump(doc, f, indent=2)
        f.write("\n")


if __name__ == "__main__":
    main()
