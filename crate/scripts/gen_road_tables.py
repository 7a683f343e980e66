"""Writes data/lahaina_roads.json and data/lahaina_init.json."""
import json
import os

OUT = os.path.join(os.path.dirname(__file__), "..", "data")

# (v_f, f_max) -> (sigma, a, b, c) as printed in the road tables
COEF = {
    (35, 875): (0.125, -5.714, 1.429, 4.286),
    (40, 1000): (0.125, -6.531, 1.633, 4.898),
    (20, 500): (0.125, -3.265, 0.816, 2.449),
    (20, 300): (0.075, -1.753, 0.263, 1.490),
    (20, 400): (0.1, -2.469, 0.494, 1.975),
    (25, 550): (0.11, -3.472, 0.764, 2.708),
    (30, 650): (0.108, -4.085, 0.885, 3.202),
    (30, 600): (0.1, -3.701, 0.741, 2.963),
}


def rows(table, prefix, specs):
    out = []
    for i, (seg, length, lanes, v, f, cls) in enumerate(specs):
        s, a, b, c = COEF[(v, f)]
        out.append({
            "table": table,
            "id": f"{prefix}[{i}]" if prefix else seg.split(":")[0],
            "segment": seg,
            "length_mi": length,
            "lanes": lanes,
            "speed_limit_mph": v,
            "road_class": cls,
            "f_max_vphpl": f,
            "sigma": s,
            "quadratic": [a, b, c],
        })
    return out


P, M, L_, A = "Parkway", "Major Collector", "Local Street", "Arterial/Parkway"
MC = "Minor Collector"
records = []
records += rows("hwy30", "Hwy30", [
    ("(source) -> Prison St", 0.01, 2, 35, 875, P),
    ("Prison St -> Dickenson St", 0.28, 2, 35, 875, P),
    ("Dickenson St -> Lahainaluna Rd", 0.16, 2, 35, 875, P),
    ("Lahainaluna Rd -> Papalaua St", 0.12, 2, 40, 1000, P),
    ("Papalaua St -> Kenui St", 0.32, 2, 40, 1000, P),
    ("Kenui St -> Keawe St", 0.17, 2, 40, 1000, P),
    ("Keawe St -> Front St", 0.66, 2, 40, 1000, P),
    ("Front St -> (exit)", 0.01, 2, 40, 1000, P),
])
records += rows("front", "Front", [
    ("(source) -> Prison St", 0.01, 1, 20, 500, M),
    ("Prison St -> Canal St", 0.06, 1, 20, 500, M),
    ("Canal St -> Dickenson St", 0.14, 1, 20, 500, M),
    ("Dickenson St -> Lahainaluna Rd", 0.16, 1, 20, 500, M),
    ("Lahainaluna Rd -> Wahie Ln", 0.05, 1, 20, 500, M),
    ("Wahie Ln -> Papalaua St", 0.10, 1, 20, 500, M),
    ("Papalaua St -> Baker St", 0.17, 1, 20, 500, M),
    ("Baker St -> Kenui St", 0.17, 1, 20, 500, M),
    ("Kenui St -> Puunoa Pl", 0.10, 1, 20, 500, M),
    ("Puunoa Pl -> Hwy-30", 0.78, 1, 20, 500, M),
])
records += rows("wainee", "Wainee", [
    ("(source) -> Prison St", 0.01, 1, 20, 300, L_),
    ("Prison St -> Hale St", 0.14, 1, 20, 300, L_),
    ("Hale St -> Dickenson St", 0.10, 1, 20, 300, L_),
    ("Dickenson St -> Panaewa St", 0.11, 1, 20, 300, L_),
    ("Panaewa St -> Lahainaluna Rd", 0.05, 1, 20, 300, L_),
    ("Lahainaluna Rd -> Papalaua St", 0.14, 1, 20, 400, MC),
    ("Papalaua St -> Baker St", 0.16, 1, 20, 400, MC),
    ("Baker St -> Kenui St", 0.16, 1, 20, 400, MC),
])
res = []
res += rows("residential", "Prison", [
    ("Front St -> Wainee St", 0.16, 1, 20, 300, L_),
    ("Wainee St -> Hwy-30", 0.08, 1, 20, 300, L_),
])
res += rows("residential", "Dicken", [
    ("Front St -> Luakini St", 0.05, 1, 20, 400, MC),
    ("Luakini St -> Wainee St", 0.09, 1, 20, 400, MC),
    ("Wainee St -> Hwy-30", 0.11, 1, 20, 400, MC),
])
res += rows("residential", "Papal", [
    ("Front St -> Wainee St", 0.15, 1, 20, 500, M),
    ("Wainee St -> Hwy-30", 0.07, 1, 20, 500, M),
])
res += rows("residential", "Kenui", [
    ("Front St -> Kahoma Vlg", 0.10, 1, 20, 400, MC),
    ("Kahoma Vlg -> Wainee St", 0.08, 1, 20, 400, MC),
    ("Wainee St -> Hwy-30", 0.02, 1, 20, 400, MC),
])
records += res
records += rows("keawe_bypass", "Keawe", [
    ("Hwy-30 -> Gateway Shopping Ctr", 0.10, 2, 25, 550, M),
    ("Gateway Shopping Ctr -> Oil Rd", 0.09, 2, 25, 550, M),
])
records += rows("keawe_bypass", "LB", [
    ("(source) -> Lahainaluna Rd", 0.01, 1, 30, 650, A),
    ("Lahainaluna Rd -> Oil Rd", 1.06, 1, 30, 650, A),
])
records += rows("lahainaluna", "LL", [
    ("Front St -> Wainee St", 0.14, 1, 20, 500, M),
    ("Wainee St -> Hwy-30", 0.09, 1, 20, 500, M),
    ("Hwy-30 -> Kuhua St", 0.14, 1, 20, 500, M),
    ("Kuhua St -> Pauoa St", 0.05, 1, 20, 500, M),
    ("Pauoa St -> Kale St", 0.09, 1, 20, 500, M),
    ("Kale St -> Paunau St", 0.08, 1, 20, 500, M),
    ("Paunau St -> Kelawea St", 0.06, 1, 20, 500, M),
    ("Kelawea St -> Kalena St", 0.12, 1, 30, 600, M),
    ("Kalena St -> Dirt Road", 0.13, 1, 30, 600, M),
    ("Dirt Road -> Lahaina Bypass", 0.03, 1, 30, 600, M),
    ("Lahaina Bypass -> (source)", 0.01, 1, 30, 600, M),
])
src = rows("sources", None, [
    ("Kuhua: Lahainaluna Rd -> (source)", 0.28, 1, 20, 300, L_),
    ("KomoMai: (source) -> Keawe St Ext", 0.18, 1, 20, 300, L_),
    ("Pauoa: Lahainaluna Rd -> (source)", 0.18, 1, 20, 300, L_),
    ("Kale: Lahainaluna Rd -> (source)", 0.18, 1, 20, 300, L_),
    ("Paunau: Lahainaluna Rd -> (source)", 0.18, 1, 20, 300, L_),
    ("Kelawea: Lahainaluna Rd -> (source)", 0.15, 1, 20, 300, L_),
    ("Kalena: Lahainaluna Rd -> (source)", 0.18, 1, 20, 300, L_),
    ("Dirt: Lahainaluna Rd -> (source)", 0.25, 1, 20, 300, L_),
])
for r in src:
    r["segment"] = r["segment"].split(": ", 1)[1]
records += src

with open(os.path.join(OUT, "lahaina_roads.json"), "w") as fh:
    json.dump({"records": records}, fh, indent=1)
    fh.write("\n")

# Initial-density table: road, segment, AADT, LOS, observed speed, rho0,
# plus the flux parameters of the segment's roads.
init = [
    ("Hwy30", "(source) -> Lahainaluna Rd", 19796, "B", 24.5, 0.178, 35, 875, 2, ["Hwy30[0]", "Hwy30[1]", "Hwy30[2]"]),
    ("Hwy30", "Lahainaluna Rd -> Kenui St", 19796, "B", 28, 0.178, 40, 1000, 2, ["Hwy30[3]", "Hwy30[4]"]),
    ("Hwy30", "Kenui St -> Keawe St", 19796, "C", 20, 0.245, 40, 1000, 2, ["Hwy30[5]"]),
    ("Hwy30", "Keawe St -> (exit)", 37300, "B", 28, 0.178, 40, 1000, 2, ["Hwy30[6]", "Hwy30[7]"]),
    ("Front", "(source) -> Hwy-30", 6060, "D", 8, 0.300, 20, 500, 1, [f"Front[{i}]" for i in range(10)]),
    ("Wainee", "(source) -> Lahainaluna Rd", 0, "A", 20, 0.0, 20, 300, 1, [f"Wainee[{i}]" for i in range(5)]),
    ("Wainee", "Lahainaluna Rd -> Kenui St", 3939, "A", 20, 0.056, 20, 400, 1, ["Wainee[5]", "Wainee[6]", "Wainee[7]"]),
    ("Prison", "Front St -> Hwy-30", 0, "A", 20, 0.0, 20, 300, 1, ["Prison[0]", "Prison[1]"]),
    ("Dicken", "Front St -> Hwy-30", 3333, "A", 20, 0.047, 20, 400, 1, ["Dicken[0]", "Dicken[1]", "Dicken[2]"]),
    ("Papal", "Front St -> Hwy-30", 3434, "A", 20, 0.049, 20, 500, 1, ["Papal[0]", "Papal[1]"]),
    ("Kenui", "Front St -> Hwy-30", 2652, "A", 20, 0.038, 20, 400, 1, ["Kenui[0]", "Kenui[1]", "Kenui[2]"]),
    ("Keawe", "Hwy-30 -> Gateway Shopping Ctr", 20196, "C", 12.5, 0.217, 25, 550, 2, ["Keawe[0]"]),
    ("Keawe", "Gateway Shopping Ctr -> Oil Rd", 20196, "B", 17.5, 0.157, 25, 550, 2, ["Keawe[1]"]),
    ("Keawe", "Oil Rd -> Lahaina Bypass", 20196, "C", 12.5, 0.217, 25, 550, 2, []),
    ("LB", "(source) -> Keawe St Ext", 16218, "B", 21, 0.154, 30, 650, 1, ["LB[0]", "LB[1]"]),
    ("LL", "Front St -> Wainee St", 8585, "C", 10, 0.245, 20, 500, 1, ["LL[0]"]),
    ("LL", "Wainee St -> Kelawea St", 8585, "B", 14, 0.178, 20, 500, 1, [f"LL[{i}]" for i in range(1, 7)]),
    ("LL", "Kelawea St -> (source)", 8585, "B", 21, 0.143, 30, 600, 1, [f"LL[{i}]" for i in range(7, 11)]),
]
keys = ["road", "segment", "aadt", "los", "v0_mph", "rho0", "v_f_mph", "f_max_vphpl", "lanes", "segments"]
with open(os.path.join(OUT, "lahaina_init.json"), "w") as fh:
    json.dump({"records": [dict(zip(keys, r)) for r in init]}, fh, indent=1)
    fh.write("\n")
print(len(records), "road records,", len(init), "init records")
