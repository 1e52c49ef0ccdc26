"""Regenerate the bundled synthetic fixture under src/panelcause/data/fixture/.

The fixture is synthetic. Published anchors used:

* league splits: the 2022/2023 bases-empty BABIP and OBP cells, a 23.3%
  left-handed share of 2023 plate appearances, a -0.001 OBP change in 2024,
  walk/strikeout effects of +0.005/+0.001;
* players: target names, 2022 shift rates and 2023 effect sizes for the 30
  high-shift hitters; cohort sizes (30 high, 58 low, 25 in the 15-30% band,
  27/42 playing 2024, one extra target when 2023 is not required);
  Seager's counterfactual as a 63/37 Marte/Correa blend.

Everything else (other seasons, control players, noise) is drawn from a fixed
seed. Run: python scripts/make_fixture.py
"""
from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

OUT = Path(__file__).resolve().parents[1] / "src" / "panelcause" / "data" / "fixture"
SEASONS = [2015, 2016, 2017, 2018, 2019, 2021, 2022, 2023, 2024]
SEED = 20230330

rng = np.random.default_rng(SEED)

# --------------------------------------------------------------------------
# league splits
# --------------------------------------------------------------------------

# RHB levels and season-over-season DID per outcome; LHB is rebuilt from the
# 2022 anchor so every DID is exact by construction.
LEAGUE = {
    # outcome: (lhb_2022, rhb by season, did by post season)
    "babip": (0.275,
              [0.298, 0.299, 0.298, 0.294, 0.297, 0.292, 0.291, 0.294, 0.292],
              [0.002, -0.003, 0.001, 0.000, -0.004, -0.005, 0.009, 0.001]),
    "obp": (0.29945,
            [0.310, 0.314, 0.318, 0.313, 0.318, 0.309, 0.3027, 0.30885, 0.3045],
            [0.003, -0.002, 0.001, -0.001, -0.004, -0.003, 0.00895, -0.001]),
    "avg": (0.226,
            [0.251, 0.254, 0.253, 0.247, 0.251, 0.243, 0.241, 0.245, 0.242],
            [0.001, -0.002, 0.002, -0.001, -0.003, -0.004, 0.008, 0.000]),
    "slg": (0.385,
            [0.410, 0.421, 0.432, 0.412, 0.437, 0.410, 0.396, 0.414, 0.405],
            [0.004, -0.003, 0.002, 0.001, -0.006, -0.004, 0.011, -0.002]),
    "ops": (0.684,
            [0.720, 0.735, 0.750, 0.725, 0.755, 0.719, 0.6987, 0.72285, 0.7095],
            [0.007, -0.005, 0.003, 0.000, -0.010, -0.007, 0.020, -0.003]),
    "woba": (0.297,
             [0.312, 0.317, 0.322, 0.313, 0.323, 0.310, 0.303, 0.311, 0.306],
             [0.003, -0.002, 0.001, 0.000, -0.004, -0.003, 0.009, -0.001]),
    "bb_pct": (0.088,
               [0.075, 0.077, 0.078, 0.078, 0.076, 0.079, 0.075, 0.080, 0.077],
               [0.001, 0.000, -0.001, 0.001, -0.001, 0.000, 0.005, -0.002]),
    "k_pct": (0.221,
              [0.205, 0.212, 0.218, 0.224, 0.229, 0.232, 0.228, 0.231, 0.229],
              [0.001, -0.001, 0.002, 0.000, 0.001, -0.001, 0.001, -0.002]),
}
LHB_SHARE = [0.228, 0.231, 0.236, 0.232, 0.230, 0.234, 0.236, 0.233, 0.229]
RHB_SHARE = [0.335, 0.331, 0.327, 0.330, 0.331, 0.326, 0.322, 0.327, 0.331]
LEAGUE_PA = [183_628, 184_580, 185_295, 185_139, 186_517, 182_052, 182_052, 184_104, 181_951]


def league_rows():
    lhb = {}
    for outcome, (anchor, rhb, did) in LEAGUE.items():
        vals = {2022: anchor}
        i22 = SEASONS.index(2022)
        for i in range(i22 + 1, len(SEASONS)):
            vals[SEASONS[i]] = vals[SEASONS[i - 1]] + (rhb[i] - rhb[i - 1]) + did[i - 1]
        for i in range(i22, 0, -1):
            vals[SEASONS[i - 1]] = vals[SEASONS[i]] - (rhb[i] - rhb[i - 1]) - did[i - 1]
        lhb[outcome] = vals
    # BABIP cells are stored at three decimals so the 2x2 contrast is exact
    lhb["babip"][2023] = 0.287
    rows = []
    for i, season in enumerate(SEASONS):
        for hand, share in (("L", LHB_SHARE[i]), ("R", RHB_SHARE[i])):
            row = [season, hand, "bases_empty", round(LEAGUE_PA[i] * share), f"{share:.3f}"]
            for outcome, (_, rhb, _) in LEAGUE.items():
                v = lhb[outcome][season] if hand == "L" else rhb[i]
                row.append(f"{v:.5f}")
            rows.append(row)
    return rows


# --------------------------------------------------------------------------
# players
# --------------------------------------------------------------------------

TARGETS = [
    # name, 2022 shift rate, 2023 effects (obp, ops, woba)
    ("Corey Seager", 0.928, 0.085, 0.271, 0.115),
    ("Kyle Tucker", 0.909, 0.047, 0.097, 0.034),
    ("Kyle Schwarber", 0.907, 0.018, 0.061, 0.026),
    ("Cody Bellinger", 0.905, 0.041, 0.130, 0.047),
    ("Joey Gallo", 0.900, -0.001, 0.037, 0.018),
    ("Max Kepler", 0.897, 0.023, 0.096, 0.044),
    ("Max Muncy", 0.890, 0.005, -0.026, -0.005),
    ("Seth Brown", 0.886, -0.035, -0.043, -0.021),
    ("Shohei Ohtani", 0.883, 0.076, 0.241, 0.083),
    ("Yordan Alvarez", 0.881, 0.015, 0.214, 0.083),
    ("Brandon Lowe", 0.853, 0.012, 0.078, 0.033),
    ("Brandon Belt", 0.852, 0.044, 0.115, 0.047),
    ("Eddie Rosario", 0.836, 0.001, 0.001, 0.003),
    ("Cavan Biggio", 0.828, 0.015, 0.030, 0.013),
    ("Anthony Rizzo", 0.826, -0.005, -0.050, -0.013),
    ("Matt Olson", 0.813, 0.075, 0.222, 0.085),
    ("Mike Yastrzemski", 0.812, 0.009, 0.078, 0.034),
    ("Eugenio Suarez", 0.809, 0.002, -0.077, -0.013),
    ("Byron Buxton", 0.788, -0.022, 0.074, 0.020),
    ("Rowdy Tellez", 0.784, -0.024, -0.083, -0.017),
    ("Carlos Santana", 0.782, -0.004, 0.021, 0.005),
    ("Jorge Soler", 0.780, 0.021, 0.081, 0.028),
    ("Jose Ramirez", 0.773, 0.058, 0.109, 0.046),
    ("Josh Naylor", 0.771, 0.031, 0.136, 0.047),
    ("Joc Pederson", 0.770, 0.024, -0.006, 0.001),
    ("Daniel Vogelbach", 0.764, 0.000, -0.013, -0.040),
    ("Bryce Harper", 0.757, 0.043, 0.094, 0.040),
    ("Salvador Perez", 0.756, -0.020, 0.049, 0.017),
    ("Marcus Semien", 0.753, 0.022, 0.158, 0.037),
    ("Ozzie Albies", 0.751, 0.030, 0.165, 0.063),
]
# targets without a qualifying 2024 season (27 of 30 remain)
NO_2024 = {"Brandon Belt", "Daniel Vogelbach", "Cavan Biggio"}
# 2024 effect as a fraction of the 2023 effect
PERSIST = {"Corey Seager": 0.1, "Matt Olson": 0.1, "Shohei Ohtani": 1.0,
           "Cody Bellinger": 1.0, "Marcus Semien": 1.0}
NAMED_CONTROLS = ["Starling Marte", "Carlos Correa", "Trea Turner", "Jean Segura",
                  "Yan Gomes", "Paul Goldschmidt", "Jose Abreu"]
N_CONTROLS, N_CONTROLS_2024 = 58, 42
N_IN_UNIT, N_MEDIUM = 25, 20

# wOBA linear weights
W_BB, W_HBP, W_1B, W_2B, W_3B, W_HR = 0.69, 0.72, 0.89, 1.27, 1.62, 2.10
ENV = dict(zip(SEASONS, [0.000, 0.003, 0.006, -0.004, 0.007, -0.006, -0.010, -0.003, -0.006]))


def slug(name):
    return name.lower().replace(" ", "_")


def season_line(talent, age, season, pa):
    """Counting stats and rates for one season of a latent talent profile."""
    t = talent
    aging = -0.0015 * (age - 28)
    bb_pct = float(np.clip(t["bb"] + rng.normal(0, 0.010), 0.02, 0.2))
    k_pct = float(np.clip(t["k"] + rng.normal(0, 0.018), 0.07, 0.4))
    hr_rate = float(np.clip(t["hr"] + rng.normal(0, 0.006) + aging / 4, 0.002, 0.09))
    babip = float(np.clip(t["babip"] + ENV[season] + aging + rng.normal(0, 0.015), 0.2, 0.4))
    bb = round(bb_pct * pa)
    hbp = round(0.01 * pa)
    sf = round(0.008 * pa)
    ab = pa - bb - hbp - sf
    so = round(k_pct * pa)
    hr = round(hr_rate * pa)
    bip = ab - so - hr + sf
    hits_bip = round(babip * bip)
    doubles = round(hits_bip * float(np.clip(t["xbh"] + rng.normal(0, 0.02), 0.1, 0.4)))
    triples = round(hits_bip * 0.02)
    singles = hits_bip - doubles - triples
    hits = singles + doubles + triples + hr
    obp = (hits + bb + hbp) / pa
    slg = (singles + 2 * doubles + 3 * triples + 4 * hr) / ab
    woba = (W_BB * bb + W_HBP * hbp + W_1B * singles + W_2B * doubles
            + W_3B * triples + W_HR * hr) / pa
    return dict(age=age, pa=pa, hits=hits, singles=singles, home_runs=hr,
                bb_pct=bb / pa, k_pct=so / pa, obp=obp, ops=obp + slg, woba=woba)


def draw_talent():
    return dict(
        bb=rng.normal(0.085, 0.022), k=rng.normal(0.21, 0.045),
        hr=max(0.008, rng.normal(0.033, 0.012)), babip=rng.normal(0.298, 0.018),
        xbh=rng.normal(0.24, 0.04),
    )


def draw_pa(season, qualifying=True):
    if not qualifying:
        return int(rng.integers(60, 240))
    return int(rng.integers(330, 700))


def generic_player(pid, name, first_season, covered, extra_low=(), age2015=None):
    """Independent latent-talent player; ``covered`` seasons get >=250 PA."""
    talent = draw_talent()
    age2015 = int(rng.integers(20, 31)) if age2015 is None else age2015
    rows = {}
    for s in SEASONS:
        if s < first_season:
            continue
        qual = s in covered and s not in extra_low
        rows[s] = season_line(talent, age2015 + (s - 2015), s, draw_pa(s, qual))
    return dict(player_id=pid, name=name, rows=rows)


def control_coverage(i):
    """Qualifying seasons for control i: always 2021-2023, varied before."""
    if i < 14:
        pre = [2015, 2016, 2017, 2018, 2019]               # full coverage
    else:
        debut = int(rng.choice([2015, 2016, 2017, 2018, 2019, 2021]))
        pre = [s for s in SEASONS if debut <= s < 2020 and rng.random() > 0.15]
    return set(pre) | {2021, 2022, 2023}


def build_controls():
    names = NAMED_CONTROLS + [f"Control Player {i:02d}" for i in range(1, N_CONTROLS - len(NAMED_CONTROLS) + 1)]
    players = []
    for i, name in enumerate(names):
        cov = control_coverage(i)
        # first 42 play a qualifying 2024
        if i < N_CONTROLS_2024:
            cov = cov | {2024}
        first = min(cov)
        players.append(generic_player(slug(name), name, first, cov))
    # Marte and Correa (indices 0, 1) sit in the full-coverage group, so they
    # cover every Seager season
    return players


def blend(donors, weights, season, noise, dip=0.0, effect=(0.0, 0.0, 0.0)):
    """Convex blend of donors' realised season lines plus idiosyncratic noise."""
    out = {}
    for key in ("age", "pa", "hits", "singles", "home_runs", "bb_pct", "k_pct", "obp", "ops", "woba"):
        out[key] = sum(w * d["rows"][season][key] for d, w in zip(donors, weights))
    for key in ("age", "pa", "hits", "singles", "home_runs"):
        out[key] = int(round(out[key]))
    out["singles"] = min(out["singles"], out["hits"] - out["home_runs"])
    out["obp"] += rng.normal(0, noise) - dip + effect[0]
    out["ops"] += rng.normal(0, 2.2 * noise) - 2.4 * dip + effect[1]
    out["woba"] += rng.normal(0, noise) - dip + effect[2]
    out["bb_pct"] += rng.normal(0, noise / 2)
    out["k_pct"] += rng.normal(0, noise)
    return out


def build_targets(controls):
    by_id = {c["player_id"]: c for c in controls}
    full = [c for c in controls if all(s in c["rows"] and c["rows"][s]["pa"] >= 250
                                       for s in (2015, 2016, 2017, 2018, 2019))]
    with_2024 = [c for c in controls if c["rows"].get(2024, {}).get("pa", 0) >= 250]
    targets = []
    for name, rate, e_obp, e_ops, e_woba in TARGETS:
        pid = slug(name)
        plays_2024 = name not in NO_2024
        if name == "Corey Seager":
            donors = [by_id["starling_marte"], by_id["carlos_correa"]]
            weights = np.array([0.63, 0.37])
            qual = [2016, 2017, 2019, 2021, 2022, 2023, 2024]
            low = [2015, 2018]
        else:
            debut = int(rng.choice([2015, 2015, 2016, 2017, 2018, 2019, 2021]))
            qual = [s for s in SEASONS if s >= debut and (s >= 2021 or rng.random() > 0.12)]
            qual = [s for s in qual if s != 2024] + ([2024] if plays_2024 else [])
            low = []
            pool = [c for c in (with_2024 if plays_2024 else controls)
                    if all(c["rows"].get(s, {}).get("pa", 0) >= 250 for s in qual)]
            if len(pool) < 4:
                pool = [c for c in full if c in with_2024] if plays_2024 else full
            k = int(rng.integers(2, 5))
            idx = rng.choice(len(pool), size=k, replace=False)
            donors = [pool[i] for i in sorted(idx)]
            weights = rng.dirichlet(np.full(k, 1.5))
        persist = PERSIST.get(name, 0.7)
        rows = {}
        for s in sorted(set(qual) | set(low)):
            if s == 2024 and not plays_2024:
                continue
            if s in low:
                line = blend(donors, weights, s, 0.004)
                line["pa"] = int(rng.integers(90, 200))
                line["hits"] = min(line["hits"], line["pa"] // 3)
                line["singles"] = min(line["singles"], line["hits"] - min(line["home_runs"], line["hits"]))
                line["home_runs"] = min(line["home_runs"], line["hits"])
            else:
                effect = (0, 0, 0)
                if s == 2023:
                    effect = (e_obp, e_ops, e_woba)
                elif s == 2024:
                    effect = (persist * e_obp, persist * e_ops, persist * e_woba)
                dip = 0.008 if s == 2022 else 0.0
                line = blend(donors, weights, s, 0.004, dip=dip, effect=effect)
            rows[s] = line
        if not plays_2024:
            line = blend(donors, weights, 2023, 0.004)
            line["pa"] = int(rng.integers(80, 230))
            line["age"] += 1
            rows[2024] = line
        targets.append(dict(player_id=pid, name=name, rows=rows, rate=rate))
    return targets


def build_extra_target(controls):
    """High-shift hitter with a short 2023: only enters when 2023 is not gated."""
    with_2024 = [c for c in controls if c["rows"].get(2024, {}).get("pa", 0) >= 250
                 and all(c["rows"].get(s, {}).get("pa", 0) >= 250 for s in (2019, 2021, 2022))]
    donors = [with_2024[1], with_2024[5], with_2024[9]]
    weights = np.array([0.5, 0.3, 0.2])
    rows = {}
    for s in (2019, 2021, 2022, 2023, 2024):
        line = blend(donors, weights, s, 0.004, effect=(0.02, 0.05, 0.02) if s == 2024 else (0, 0, 0))
        rows[s] = line
    rows[2023]["pa"] = 178
    return dict(player_id="extra_target_01", name="Extra Target 01", rows=rows, rate=0.79)


def build_others():
    in_unit, medium, ungated = [], [], []
    for i in range(N_IN_UNIT):
        cov = {s for s in SEASONS if s >= int(rng.choice([2015, 2016, 2018, 2021]))} - {2024}
        if rng.random() < 0.7:
            cov |= {2024}
        p = generic_player(f"in_unit_{i + 1:02d}", f"In-Unit Player {i + 1:02d}", min(cov), cov)
        p["rate"] = 0.30 if i == 0 else round(float(rng.uniform(0.152, 0.299)), 3)
        in_unit.append(p)
    for i in range(N_MEDIUM):
        cov = {s for s in SEASONS if s >= int(rng.choice([2015, 2017, 2019, 2021]))}
        p = generic_player(f"medium_{i + 1:02d}", f"Medium Player {i + 1:02d}", min(cov), cov)
        p["rate"] = round(float(rng.uniform(0.31, 0.74)), 3)
        medium.append(p)
    for i in range(3):
        # no qualifying 2022: never rated, has no shift rate
        cov = {2016, 2017, 2018, 2019, 2021}
        p = generic_player(f"ungated_{i + 1:02d}", f"Ungated Player {i + 1:02d}", 2016, cov)
        ungated.append(p)
    return in_unit, medium, ungated


def player_rows(players):
    rows = []
    for p in players:
        for s in sorted(p["rows"]):
            r = p["rows"][s]
            hits = min(r["hits"], r["pa"])
            hr = min(r["home_runs"], hits)
            singles = max(0, min(r["singles"], hits - hr))
            rows.append([
                p["player_id"], p["name"], s, r["age"], r["pa"], hits, singles, hr,
                f"{r['bb_pct']:.4f}", f"{r['k_pct']:.4f}",
                f"{r['obp']:.4f}", f"{r['ops']:.4f}", f"{r['woba']:.4f}",
            ])
    return rows


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    with open(OUT / "league_splits.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["season", "handedness", "split", "pa", "pa_share", *LEAGUE])
        w.writerows(league_rows())

    controls = build_controls()
    controls[13]["rate"] = 0.15  # boundary value, inclusive LOW
    for c in controls:
        c.setdefault("rate", round(float(rng.uniform(0.01, 0.149)), 3))
    targets = build_targets(controls)
    extra = build_extra_target(controls)
    in_unit, medium, ungated = build_others()
    everyone = controls + targets + [extra] + in_unit + medium + ungated
    everyone.sort(key=lambda p: p["player_id"])

    with open(OUT / "player_seasons.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["player_id", "name", "season", "age", "pa", "hits", "singles",
                    "home_runs", "bb_pct", "k_pct", "obp", "ops", "woba"])
        w.writerows(player_rows(everyone))

    with open(OUT / "shift_rates.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["player_id", "season", "shift_pct"])
        for p in everyone:
            if "rate" in p:
                w.writerow([p["player_id"], 2022, f"{p['rate']:.3f}"])
                prior = float(np.clip(p["rate"] - rng.uniform(0.0, 0.1), 0.0, 1.0))
                w.writerow([p["player_id"], 2021, f"{prior:.3f}"])


if __name__ == "__main__":
    main()
