"""Writes the Lahaina phase networks and scenarios under data/lahaina/.

Junction lists are derived from road ends, so a phase only edits roads.
"""
import copy
import json
import os

HERE = os.path.dirname(__file__)
DATA = os.path.join(HERE, "..", "data")
OUT = os.path.join(DATA, "lahaina")

EAST = {"Kuhua", "KomoMai", "Pauoa", "Kale", "Paunau", "Kelawea", "Kalena", "Dirt", "OilRd"}

# junction drawing positions, x east, y north
POS = {
    "jF_prison": (0, 0), "jF_canal": (0, 0.5), "jF_dick": (0, 1), "jF_ll": (0, 2),
    "jF_wahie": (0, 2.4), "jF_papal": (0, 3), "jF_baker": (0, 4), "jF_kenui": (0, 5),
    "jF_puunoa": (0, 5.6),
    "jW_prison": (1, 0), "jW_hale": (1, 0.6), "jW_dick": (1, 1), "jW_panaewa": (1, 1.6),
    "jW_ll": (1, 2), "jW_papal": (1, 3), "jW_baker": (1, 4), "jW_kenui": (1, 5),
    "j_luakini": (0.5, 1), "j_kahoma": (0.5, 5),
    "jH_prison": (2, 0), "jH_dick": (2, 1), "jH_ll": (2, 2), "jH_papal": (2, 3),
    "jH_kenui": (2, 5), "jH_keawe": (2, 6.5), "h5": (2, 9),
    "jE_kuhua": (2.8, 2), "jE_pauoa": (3.3, 2), "jE_kale": (3.8, 2), "jE_paunau": (4.3, 2),
    "jE_kelawea": (4.8, 2), "jE_kalena": (5.4, 2), "jE_dirt": (6.0, 2), "jE_bypass": (6.4, 2),
    "j_oil": (4.5, 6.5), "j_gateway": (3.3, 6.5),
}


def prescribed(density=None):
    b = {"type": "prescribed"}
    if density is not None:
        b["density"] = density
    return b


NONREFLECTING = {"type": "nonreflecting"}


def load_tables():
    with open(os.path.join(DATA, "lahaina_roads.json")) as f:
        recs = {r["id"]: r for r in json.load(f)["records"]}
    with open(os.path.join(DATA, "lahaina_init.json")) as f:
        init = {}
        for row in json.load(f)["records"]:
            for seg in row["segments"]:
                init[seg] = row["rho0"]
    return recs, init


def road(rid, length, lanes, v, f, left, right, **extra):
    r = {"id": rid, "length_mi": length, "lanes": lanes, "v_f_mph": v, "f_c_vphpl": f,
         "left": left, "right": right}
    r.update(extra)
    return r


def from_table(recs, init, rid, left, right, **extra):
    t = recs[rid]
    r = road(rid, t["length_mi"], t["lanes"], t["speed_limit_mph"], t["f_max_vphpl"], left, right, **extra)
    if rid in init and "source" not in extra:
        r["init_density"] = init[rid]
    return r


def local_source(rid, junction, length=0.01, v=20, f=300, start=None):
    r = road(rid, length, 1, v, f, prescribed(), junction, source=True)
    r["region"] = "east" if rid in EAST else "west"
    if start is not None:
        r["geometry"] = [list(start), list(POS[junction])]
    return r


def am_base(recs, init):
    R = []
    t = lambda rid, l, r, **kw: R.append(from_table(recs, init, rid, l, r, **kw))
    # Front St, northbound
    fj = ["jF_prison", "jF_canal", "jF_dick", "jF_ll", "jF_wahie", "jF_papal", "jF_baker", "jF_kenui", "jF_puunoa", "h5"]
    t("Front[0]", prescribed(), fj[0], source=True)
    for k in range(1, 10):
        t(f"Front[{k}]", fj[k - 1], fj[k])
    # Wainee St
    wj = ["jW_prison", "jW_hale", "jW_dick", "jW_panaewa", "jW_ll", "jW_papal", "jW_baker", "jW_kenui"]
    t("Wainee[0]", prescribed(), wj[0], source=True)
    for k in range(1, 8):
        t(f"Wainee[{k}]", wj[k - 1], wj[k])
    # Hwy 30
    hj = ["jH_prison", "jH_dick", "jH_ll", "jH_papal", "jH_kenui", "jH_keawe", "h5"]
    t("Hwy30[0]", prescribed(), hj[0], source=True)
    for k in range(1, 7):
        t(f"Hwy30[{k}]", hj[k - 1], hj[k])
    t("Hwy30[7]", "h5", NONREFLECTING, exit=True)
    # cross streets, eastbound
    t("Prison[0]", "jF_prison", "jW_prison")
    t("Prison[1]", "jW_prison", "jH_prison")
    t("Dicken[0]", "jF_dick", "j_luakini")
    t("Dicken[1]", "j_luakini", "jW_dick")
    t("Dicken[2]", "jW_dick", "jH_dick")
    t("Papal[0]", "jF_papal", "jW_papal")
    t("Papal[1]", "jW_papal", "jH_papal")
    t("Kenui[0]", "jF_kenui", "j_kahoma")
    t("Kenui[1]", "j_kahoma", "jW_kenui")
    t("Kenui[2]", "jW_kenui", "jH_kenui")
    t("LL[0]", "jF_ll", "jW_ll")
    t("LL[1]", "jW_ll", "jH_ll")
    # Lahainaluna Rd, westbound from the bypass
    ej = ["jH_ll", "jE_kuhua", "jE_pauoa", "jE_kale", "jE_paunau", "jE_kelawea", "jE_kalena", "jE_dirt", "jE_bypass"]
    for k in range(2, 10):
        t(f"LL[{k}]", ej[k - 1], ej[k - 2])
    t("LL[10]", prescribed(), "jE_bypass", source=True, region="east")
    # bypass and Keawe St, toward Hwy 30
    t("LB[0]", prescribed(), "jE_bypass", source=True, region="east")
    t("LB[1]", "jE_bypass", "j_oil")
    t("Keawe[1]", "j_oil", "j_gateway")
    t("Keawe[0]", "j_gateway", "jH_keawe")
    # eastern sources
    for name, j in [("Kuhua", "jE_kuhua"), ("Pauoa", "jE_pauoa"), ("Kale", "jE_kale"),
                    ("Paunau", "jE_paunau"), ("Kelawea", "jE_kelawea"), ("Kalena", "jE_kalena")]:
        x, y = POS[j]
        t(name, prescribed(), j, source=True, region="east", geometry=[[x, y - 0.8], [x, y]])
    t("KomoMai", prescribed(), "j_oil", source=True, region="east", geometry=[[4.5, 7.5], list(POS["j_oil"])])
    # western sources
    R.append(local_source("Wahie", "jF_wahie", start=(-0.5, 2.4)))
    R.append(local_source("Baker", "jF_baker", start=(0.5, 4.2)))
    R.append(local_source("KahomaLoop", "j_kahoma", start=(0.5, 5.5)))
    R.append(local_source("Puunoa", "jF_puunoa", start=(-0.5, 5.6)))
    return R


def ids(R):
    return {r["id"]: r for r in R}


def remove(R, *names):
    names = set(names)
    missing = names - set(ids(R))
    assert not missing, missing
    return [r for r in R if r["id"] not in names]


def phases(recs, init):
    out = []
    R = am_base(recs, init)
    out.append(("am_base", R))

    R = remove(R, "Papal[0]", "Papal[1]")
    out.append(("am2", R))

    R = remove(R, "LL[0]", "LL[1]")
    out.append(("am3", R))

    R = remove(copy.deepcopy(R), "LL[9]", "LL[10]")
    ids(R)["LL[8]"]["left"] = prescribed(0.0)
    R += [
        local_source("Canal", "jF_canal", start=(-0.5, 0.5)),
        local_source("Hale", "jW_hale", start=(1.5, 0.6)),
        local_source("Luakini", "j_luakini", start=(0.5, 0.5)),
        local_source("Panaewa", "jW_panaewa", start=(1.5, 1.6)),
    ]
    out.append(("pm_base", R))

    R = remove(copy.deepcopy(R), "LB[0]", "LB[1]")
    ids(R)["KomoMai"]["right"] = "j_gateway"
    ids(R)["KomoMai"]["geometry"] = [[3.3, 7.5], list(POS["j_gateway"])]
    ids(R)["Keawe[1]"]["left"] = prescribed(0.0)
    out.append(("pm2", R))

    R = copy.deepcopy(R)
    ids(R)["Keawe[1]"]["left"] = "j_oil"
    R.append(local_source("OilRd", "j_oil", length=0.2, v=20, f=300, start=(5.5, 7.0)))
    out.append(("pm3", R))

    R = remove(R, "Dicken[2]")
    out.append(("pm4", R))

    R = copy.deepcopy(R)
    ids(R)["LL[8]"]["left"] = "jE_dirt"
    R += [
        road("Hwy30_S", 0.45, 2, 35, 875, "jH_ll", NONREFLECTING, exit=True, geometry=[[2, 2], [2.3, -0.5]]),
        road("Front_S", 0.37, 1, 20, 500, "jF_ll", NONREFLECTING, exit=True, geometry=[[0, 2], [-0.3, -0.5]]),
        road("Wainee_S", 0.40, 1, 20, 300, "jW_ll", NONREFLECTING, exit=True, geometry=[[1, 2], [1.3, -0.5]]),
        road("LB_S", 1.07, 1, 30, 650, "jE_dirt", NONREFLECTING, exit=True, geometry=[[6, 2], [6.2, -0.5]]),
    ]
    d = from_table(recs, init, "Dirt", prescribed(), "jE_dirt", source=True, region="east",
                   geometry=[[6.0, 1.2], list(POS["jE_dirt"])])
    R.append(d)
    out.append(("pm5", R))
    return out


def finish(name, R):
    R = copy.deepcopy(R)
    junctions = {}
    for r in R:
        if isinstance(r["left"], str):
            junctions.setdefault(r["left"], {"in": [], "out": []})["out"].append(r["id"])
        if isinstance(r["right"], str):
            junctions.setdefault(r["right"], {"in": [], "out": []})["in"].append(r["id"])
        if "geometry" not in r:
            a = POS[r["left"]] if isinstance(r["left"], str) else None
            b = POS[r["right"]] if isinstance(r["right"], str) else None
            if a is None:
                a = (b[0], b[1] - 0.4)
            if b is None:
                b = (a[0], a[1] + 0.4)
            r["geometry"] = [list(a), list(b)]
    js = []
    for jid in sorted(junctions):
        j = junctions[jid]
        assert j["in"] and j["out"], (name, jid, j)
        js.append({"id": jid, "in": j["in"], "out": j["out"]})
    return {"name": name, "roads": R, "junctions": js}


DURATIONS = {"am_base": 8700, "am2": 3360, "am3": 2340, "pm_base": 1500,
             "pm2": 3840, "pm3": 360, "pm4": 720, "pm5": 1380}


def scenario(names, gamma1, gamma2, nt_opt=0.0, exit_lanes=None, dx=0.02):
    """Eastern sources take gamma2 from PM2 on; before that both sides use gamma1."""
    ph = []
    for n in names:
        late = n in ("pm2", "pm3", "pm4", "pm5")
        p = {"name": n, "network": f"{n}.json", "duration_s": DURATIONS[n],
             "gamma1": gamma1, "gamma2": gamma2 if late else gamma1, "nt_opt_s": nt_opt}
        if exit_lanes is not None and n in ("pm2", "pm3", "pm4"):
            p["exit_lanes"] = exit_lanes
        ph.append(p)
    return {"phases": ph, "rho_jam": 200.0, "cfl_nu": 0.5, "dx_target_mi": dx, "seed": 0}


def main():
    os.makedirs(OUT, exist_ok=True)
    recs, init = load_tables()
    for name, R in phases(recs, init):
        with open(os.path.join(OUT, f"{name}.json"), "w") as f:
            json.dump(finish(name, R), f, indent=1)
            f.write("\n")
    scenarios = {
        "am_base_flood.json": scenario(["am_base"], 0.075, 0.075),
        "am_base_light.json": scenario(["am_base"], 0.01, 0.01),
        "full_sequence.json": scenario(list(DURATIONS), 0.0375, 0.1),
        "phase4.json": scenario(list(DURATIONS)[:7], 0.0375, 0.1, exit_lanes=2),
    }
    for fname, s in scenarios.items():
        with open(os.path.join(OUT, fname), "w") as f:
            json.dump(s, f, indent=1)
            f.write("\n")


if __name__ == "__main__":
    main()
