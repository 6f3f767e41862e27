#!/usr/bin/env python3
"""Synthetic winter-season price fixture, Dec 2017 to Apr 2018.

Seefeld prices sit above Mayrhofen every month and peak in February.
Writes season.nq (snapshot graphs) and season.expected.json, the per-month
averages computed here independently of the toolkit.
"""
import json
import pathlib
import random

HERE = pathlib.Path(__file__).parent
S = "https://schema.org/"
RDF_TYPE = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"
MONTHS = [(2017, 12), (2018, 1), (2018, 2), (2018, 3), (2018, 4)]
SEASON = {(2017, 12): 1.00, (2018, 1): 1.05, (2018, 2): 1.35, (2018, 3): 1.10, (2018, 4): 0.85}
REGIONS = {"Seefeld": ("6100", 140, 4), "Mayrhofen": ("6290", 95, 5)}


def iri(x):
    return f"<{x}>"


def lit(x):
    return '"' + x + '"'


def cents_str(c):
    return f"{c // 100}.{c % 100:02d}"


def half_up(num, den):
    return (2 * num + den) // (2 * den)


def main():
    rng = random.Random(42)
    lines = []
    prices = {}  # (region, month) -> hotel -> list of cents
    for region, (plz, base, count) in REGIONS.items():
        slug = region.split()[0].lower()
        for h in range(count):
            hotel = f"https://{slug}.example/hotel/{h}"
            addr = f"urn:ex:address:{slug}:{h}"
            g0 = f"urn:snapshot:{slug}-dmo:2017-12-01"
            lines.append(f"{iri(hotel)} {iri(RDF_TYPE)} {iri(S + 'Hotel')} {iri(g0)} .")
            lines.append(f"{iri(hotel)} {iri(S + 'name')} {lit(f'{region} Hotel {h}')} {iri(g0)} .")
            lines.append(f"{iri(hotel)} {iri(S + 'address')} {iri(addr)} {iri(g0)} .")
            lines.append(f"{iri(addr)} {iri(S + 'postalCode')} {lit(plz)} {iri(g0)} .")
            lines.append(f"{iri(addr)} {iri(S + 'addressLocality')} {lit(region)} {iri(g0)} .")
            hotel_factor = 1 + 0.08 * h
            for (y, m) in MONTHS:
                for day in (3, 17):
                    graph = f"urn:snapshot:{slug}-dmo:{y:04d}-{m:02d}-{day:02d}"
                    for k in range(3):
                        cents = int(base * SEASON[(y, m)] * hotel_factor * 100) + rng.randint(0, 3000) + 1500 * k
                        offer = f"urn:ex:offer:{slug}:{h}:{y}{m:02d}{day:02d}:{k}"
                        spec = offer + ":spec"
                        lines.append(f"{iri(offer)} {iri(RDF_TYPE)} {iri(S + 'Offer')} {iri(graph)} .")
                        lines.append(f"{iri(offer)} {iri(S + 'itemOffered')} {iri(hotel)} {iri(graph)} .")
                        lines.append(f"{iri(offer)} {iri(S + 'priceSpecification')} {iri(spec)} {iri(graph)} .")
                        lines.append(f"{iri(spec)} {iri(S + 'price')} {lit(cents_str(cents))} {iri(graph)} .")
                        prices.setdefault((region, (y, m)), {}).setdefault(hotel, []).append(cents)

    expected = {}
    for region in REGIONS:
        series = []
        for (y, m) in MONTHS:
            per_hotel = prices[(region, (y, m))]
            mins = [min(v) for v in per_hotel.values()]
            maxs = [max(v) for v in per_hotel.values()]
            series.append({"year": y, "month": m,
                           "avgMin": half_up(sum(mins), len(mins)),
                           "avgMax": half_up(sum(maxs), len(maxs)),
                           "count": len(per_hotel)})
        expected[region] = series

    s, mh = expected["Seefeld"], expected["Mayrhofen"]
    assert all(a["avgMin"] > b["avgMin"] for a, b in zip(s, mh))
    assert max(s, key=lambda p: p["avgMin"])["month"] == 2
    assert max(s, key=lambda p: p["avgMax"])["month"] == 2

    (HERE / "season.nq").write_text("\n".join(sorted(lines)) + "\n", encoding="utf-8")
    (HERE / "season.expected.json").write_text(json.dumps(expected, indent=2) + "\n", encoding="utf-8")
    print(len(lines), "quads")


if __name__ == "__main__":
    main()
