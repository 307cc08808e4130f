"""Turn a tab-separated extract of the source tables into the CSV fixtures under data/.

The extract holds seven blocks, each opened by a "Table N" line (1 population,
2 migrant stock, 3 soft power, 4 language shares, 5 families, 6 export shares, 7 FDI).

Usage: python3 scripts/transcribe_tables.py <extract.txt> <out_dir>
"""
import sys
from pathlib import Path

ZONES = ["Chinese", "English", "Hindustani", "Spanish", "Arabic", "Malay", "Russian",
         "Bengali", "Portuguese", "French", "Hausa", "Japanese", "German", "Persian",
         "Swahili", "Javanese", "Korean", "Turkish", "Vietnamese", "Italian"]
TERMS = [2017, 2022, 2027, 2032, 2037, 2042, 2047, 2052, 2057, 2062, 2067]
FAMILIES = ["sino_tibetan", "indo_european", "afro_asiatic", "austronesian",
            "niger_congo", "dravidian", "turkic", "austroasiatic"]
# digit-count transcription anomalies in the population table: (zone, term) -> corrected
POPULATION_FIXES = {(1, 2052): 1350221817, (2, 2057): 2063457736}


def sections(text):
    out, cur = {}, None
    for line in text.splitlines():
        if line.startswith("Table"):
            cur = int(line[len("Table"):].strip()[0])
            out[cur] = []
        elif cur is not None and line.strip():
            out[cur].append(line.split("\t"))
    return out


def main():
    src, dst = Path(sys.argv[1]), Path(sys.argv[2])
    dst.mkdir(parents=True, exist_ok=True)
    s = sections(src.read_text())

    rows = s[1][2:]
    lines = ["zone_id,zone," + ",".join(map(str, TERMS))]
    raw_lines = list(lines)
    for z, r in enumerate(rows):
        vals = [int(v) for v in r[2:13]]
        raw_lines.append(f"{z},{ZONES[z]}," + ",".join(map(str, vals)))
        for k, t in enumerate(TERMS):
            if (z, t) in POPULATION_FIXES:
                vals[k] = POPULATION_FIXES[(z, t)]
        lines.append(f"{z},{ZONES[z]}," + ",".join(map(str, vals)))
    (dst / "population.csv").write_text("\n".join(lines) + "\n")
    (dst / "population_raw.csv").write_text("\n".join(raw_lines) + "\n")

    rows = s[2][2:]
    lines = ["origin," + ",".join(ZONES)]
    for z, r in enumerate(rows):
        lines.append(ZONES[z] + "," + ",".join(str(int(v)) for v in r[1:21]))
    (dst / "migrant_stock.csv").write_text("\n".join(lines) + "\n")

    rows = s[3][2:]
    lines = ["zone_id,zone,soft_power"]
    for z, r in enumerate(rows):
        lines.append(f"{z},{ZONES[z]},{r[2]}")
    (dst / "soft_power.csv").write_text("\n".join(lines) + "\n")

    rows = s[4][2:]
    lines = ["zone_id,zone,l1_share,l2_share"]
    for z, r in enumerate(rows[:20]):
        lines.append(f"{z},{ZONES[z]},{r[1]},{r[2]}")
    lines.append(f"alpha,,{rows[20][-1]},")
    (dst / "initial_distribution.csv").write_text("\n".join(lines) + "\n")

    rows = s[5][2:]
    lines = ["zone_id,zone," + ",".join(FAMILIES)]
    for z, r in enumerate(rows):
        lines.append(f"{z},{ZONES[z]}," + ",".join(r[2:10]))
    (dst / "family.csv").write_text("\n".join(lines) + "\n")

    rows = s[6][2:]
    lines = ["origin," + ",".join(ZONES)]
    for z, r in enumerate(rows):
        lines.append(ZONES[z] + "," + ",".join(r[1:21]))
    (dst / "export_share.csv").write_text("\n".join(lines) + "\n")

    rows = s[7][2:]
    lines = ["zone_id,zone,fdi_outflow_pct_gdp"]
    for z, r in enumerate(rows):
        lines.append(f"{z},{ZONES[z]},{r[1]}")
    (dst / "fdi.csv").write_text("\n".join(lines) + "\n")


if __name__ == "__main__":
    main()
