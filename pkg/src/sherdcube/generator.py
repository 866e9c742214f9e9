"""Deterministic synthetic bundle generator.

The real laboratory corpus is not redistributable, so acceptance fixtures are
generated from a manifest that pins every count the analysis scenario relies
on: how many samples carry the ware name in their description, how many sit
in the reference chemical group, and how both populations spread over
countries. The same seed always produces a byte-identical bundle, which makes
the manifest the ground truth for count assertions.
"""

from __future__ import annotations

import csv
import io
import json
import random
from dataclasses import asdict, dataclass, field

WARE_TERM = "Zeuxippus"
STRICTO_GROUP_NAME = "Zeuxippus Ware stricto sensu"

_DEFAULT_TYPOLOGY_BY_COUNTRY = {
    "Egypt": 18,
    "France": 3,
    "Greece": 40,
    "Israel": 20,
    "Italy": 22,
    "Turkey": 33,
    "Ukraine": 27,
}
_DEFAULT_STRICTO_BY_COUNTRY = {
    "Egypt": 11,
    "France": 2,
    "Greece": 12,
    "Israel": 14,
    "Italy": 10,
    "Turkey": 23,
    "Ukraine": 15,
}

# town -> region per country; sites are derived from towns
_PLACES = {
    "Egypt": (("Alexandria", "Nile Delta"), ("Fustat", "Cairo")),
    "France": (("Marseille", "Provence"), ("Lyon", "Rhone valley")),
    "Greece": (("Thessaloniki", "Macedonia"), ("Corinth", "Peloponnese"), ("Athens", "Attica")),
    "Israel": (("Jerusalem", "Judea"),),
    "Italy": (("Venice", "Veneto"), ("Otranto", "Apulia")),
    "Turkey": (("Istanbul", "Marmara"), ("Iznik", "Marmara"), ("Ephesus", "Aegean")),
    "Ukraine": (("Chersonesos", "Crimea"),),
}

# town + country known, site and region missing
_GAPPY_PLACES = (("Sudak", "Ukraine"), ("Acre", "Israel"))


class InvalidManifest(Exception):
    pass


@dataclass(frozen=True)
class ElementSpec:
    name: str
    technique: str
    unit: str
    low: float
    high: float


_DEFAULT_ELEMENTS = (
    ElementSpec("Si", "CHEMISTRY", "wt_percent", 20.0, 32.0),
    ElementSpec("Al", "CHEMISTRY", "wt_percent", 9.0, 18.0),
    ElementSpec("Ca", "CHEMISTRY", "wt_percent", 2.0, 12.0),
    ElementSpec("Fe", "CHEMISTRY", "wt_percent", 3.0, 9.0),
    ElementSpec("K", "CHEMISTRY", "wt_percent", 1.0, 4.0),
    ElementSpec("Mg", "CHEMISTRY", "wt_percent", 1.0, 5.0),
    ElementSpec("Ti", "CHEMISTRY", "wt_percent", 0.3, 1.2),
    ElementSpec("Sr", "CHEMISTRY", "ppm", 80.0, 600.0),
    ElementSpec("Zr", "CHEMISTRY", "ppm", 60.0, 320.0),
)


@dataclass
class GeneratorManifest:
    seed: int = 42
    total_samples: int = 300
    zeuxippus_typology_count: int = 163
    stricto_sensu_count: int = 87
    typology_by_country: dict = field(default_factory=lambda: dict(_DEFAULT_TYPOLOGY_BY_COUNTRY))
    stricto_by_country: dict = field(default_factory=lambda: dict(_DEFAULT_STRICTO_BY_COUNTRY))
    noise_wares: tuple = (
        ("Common ware", "COMM."),
        ("Sgraffito ware", "FINE"),
        ("Transport amphora", "AMPH."),
        ("Cooking pot", "COOK."),
        ("Glazed tile", "CARREAU"),
    )
    noise_periods: tuple = (
        ("Medieval", "Frankish"),
        ("Medieval", None),
        ("Roman", None),
        ("Ottoman", None),
    )
    other_groups: tuple = ("Aegean calcareous group", "Anatolian fabric group", "Pontic group")
    elements: tuple = _DEFAULT_ELEMENTS
    analyses_per_sample: tuple = (4, 7)
    repeat_run_fraction: float = 0.15
    petro_fraction: float = 0.25
    gappy_noise_fraction: float = 0.2
    media_fraction: float = 0.3

    def validate(self) -> None:
        if self.stricto_sensu_count > self.zeuxippus_typology_count:
            raise InvalidManifest("group count cannot exceed the typology count")
        if sum(self.typology_by_country.values()) != self.zeuxippus_typology_count:
            raise InvalidManifest("typology_by_country must sum to zeuxippus_typology_count")
        if sum(self.stricto_by_country.values()) != self.stricto_sensu_count:
            raise InvalidManifest("stricto_by_country must sum to stricto_sensu_count")
        for country, count in self.stricto_by_country.items():
            if count > self.typology_by_country.get(country, 0):
                raise InvalidManifest(f"{country}: group count exceeds typology count")
        if any(c < 0 for c in self.typology_by_country.values()):
            raise InvalidManifest("negative per-country count")
        if any(c < 0 for c in self.stricto_by_country.values()):
            raise InvalidManifest("negative per-country count")
        if self.total_samples < self.zeuxippus_typology_count:
            raise InvalidManifest("total_samples cannot be below the typology count")
        lo, hi = self.analyses_per_sample
        if lo < 1 or hi < lo:
            raise InvalidManifest("analyses_per_sample must be (min>=1, max>=min)")
        for el in self.elements:
            if el.low > el.high:
                raise InvalidManifest(f"element {el.name}: low > high")
            if el.unit == "wt_percent" and el.high > 100:
                raise InvalidManifest(f"element {el.name}: wt_percent range exceeds 100")
        unknown = set(self.typology_by_country) - set(_PLACES)
        if unknown:
            raise InvalidManifest(f"no place data for countries {sorted(unknown)}")

    def to_dict(self) -> dict:
        raw = asdict(self)
        raw["elements"] = [asdict(e) for e in self.elements]
        raw["noise_wares"] = [list(w) for w in self.noise_wares]
        raw["noise_periods"] = [list(p) for p in self.noise_periods]
        raw["other_groups"] = list(self.other_groups)
        raw["analyses_per_sample"] = list(self.analyses_per_sample)
        return raw

    @classmethod
    def from_dict(cls, raw: dict) -> "GeneratorManifest":
        kwargs = dict(raw)
        if "elements" in kwargs:
            kwargs["elements"] = tuple(ElementSpec(**e) for e in kwargs["elements"])
        for key in ("noise_wares", "noise_periods"):
            if key in kwargs:
                kwargs[key] = tuple(tuple(item) for item in kwargs[key])
        if "other_groups" in kwargs:
            kwargs["other_groups"] = tuple(kwargs["other_groups"])
        if "analyses_per_sample" in kwargs:
            kwargs["analyses_per_sample"] = tuple(kwargs["analyses_per_sample"])
        return cls(**kwargs)


def default_manifest(seed: "int | None" = None) -> GeneratorManifest:
    manifest = GeneratorManifest()
    if seed is not None:
        manifest.seed = seed
    return manifest


def _csv_bytes(header: list[str], rows: list[list[str]]) -> bytes:
    buf = io.StringIO(newline="")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue().encode("utf-8")


def generate(manifest: GeneratorManifest) -> tuple[dict[str, bytes], dict]:
    """Produce a CSV bundle plus a manifest echo with realized counts.

    The bundle validates cleanly and the pinned counts are recoverable through
    the canonical queries; identical manifests yield byte-identical bundles.
    """
    manifest.validate()
    rng = random.Random(manifest.seed)

    location_rows: list[list[str]] = []
    pools: dict[str, list[str]] = {c: [] for c in sorted(_PLACES)}

    def add_location(site, town, region, country, with_coords: bool) -> str:
        loc_id = f"loc-{len(location_rows) + 1:04d}"
        lat = lon = ""
        if with_coords:
            lat = f"{rng.uniform(30.0, 47.0):.4f}"
            lon = f"{rng.uniform(-5.0, 40.0):.4f}"
        location_rows.append([loc_id, site or "", town or "", region or "", country or "", lat, lon])
        return loc_id

    for country in sorted(_PLACES):
        for town, region in _PLACES[country]:
            for suffix in ("excavation", "kiln site"):
                loc_id = add_location(f"{town} {suffix}", town, region, country, rng.random() < 0.5)
                pools[country].append(loc_id)
    for town, country in _GAPPY_PLACES:
        loc_id = add_location(None, town, None, country, False)
        pools[country].append(loc_id)
    # gap patterns without a country, used by noise samples only
    orphan_pool = [
        add_location("Shipwreck trench B", None, None, None, False),
        add_location(None, "Saranda", None, None, False),
        add_location("Harbour mole", "Saranda", None, None, False),
    ]

    group_rows = [["grp-stricto", STRICTO_GROUP_NAME, "chemical"]]
    other_group_ids = []
    for i, name in enumerate(manifest.other_groups, start=1):
        gid = f"grp-{i:02d}"
        basis = "chemical" if i % 2 else "petrographic"
        group_rows.append([gid, name, basis])
        other_group_ids.append(gid)

    dating_rows: list[list[str]] = []
    dating_ids: dict[tuple, str] = {}

    def dating_id(period: str, sub_period: "str | None") -> str:
        key = (period, sub_period)
        if key not in dating_ids:
            did = f"dat-{len(dating_ids) + 1:02d}"
            years = {
                "Roman": ("-27", "395"),
                "Medieval": ("500", "1500"),
                "Ottoman": ("1300", "1920"),
            }.get(period, ("", ""))
            dating_rows.append([did, period, sub_period or "", years[0], years[1]])
            dating_ids[key] = did
        return dating_ids[key]

    description_rows: list[list[str]] = []
    sample_rows: list[list[str]] = []
    analysis_rows: list[list[str]] = []
    media_rows: list[list[str]] = []

    def add_media(sample_id: str) -> list[str]:
        ids = []
        if rng.random() < manifest.media_fraction:
            mid = f"m-{len(media_rows) + 1:04d}"
            media_rows.append([mid, "photo", f"media/{sample_id}.jpg", f"Photograph of {sample_id}"])
            ids.append(mid)
            if rng.random() < 0.3:
                mid = f"m-{len(media_rows) + 1:04d}"
                media_rows.append([mid, "drawing", f"media/{sample_id}.svg", ""])
                ids.append(mid)
        return ids

    def add_analyses(sample_id: str) -> None:
        lo, hi = manifest.analyses_per_sample
        elements = list(manifest.elements)
        picked = rng.sample(elements, min(rng.randint(lo, hi), len(elements)))
        for el in picked:
            aid = f"a-{len(analysis_rows) + 1:06d}"
            value = f"{rng.uniform(el.low, el.high):.2f}"
            analysis_rows.append([aid, sample_id, el.technique, el.name, value, el.unit, "r1"])
        if picked and rng.random() < manifest.repeat_run_fraction:
            el = picked[0]
            aid = f"a-{len(analysis_rows) + 1:06d}"
            value = f"{rng.uniform(el.low, el.high):.2f}"
            analysis_rows.append([aid, sample_id, el.technique, el.name, value, el.unit, "r2"])
        if rng.random() < manifest.petro_fraction:
            aid = f"a-{len(analysis_rows) + 1:06d}"
            value = f"{rng.uniform(0.5, 9.5):.2f}"
            analysis_rows.append([aid, sample_id, "PETRO", "inclusion_density", value, "dimensionless", "r1"])
        if rng.random() < 0.1:
            aid = f"a-{len(analysis_rows) + 1:06d}"
            value = f"{rng.uniform(1.0, 5.0):.2f}"
            analysis_rows.append([aid, sample_id, "BINO", "fabric_index", value, "dimensionless", "r1"])

    def add_description(sample_id: str, typology: str, category: str, notes: str) -> str:
        did = f"d-{sample_id}"
        part = rng.choice(["rim", "base", "body", "handle", ""])
        firing = rng.choice(["mode A", "mode B", "mode C", "", ""])
        waster = "true" if rng.random() < 0.04 else "false"
        description_rows.append([did, notes, typology, category, part, waster, firing])
        return did

    attribution_pool = pools["Turkey"][:2]

    realized_typ: dict[str, int] = {}
    realized_str: dict[str, int] = {}
    seq = 0
    for country in sorted(manifest.typology_by_country):
        total = manifest.typology_by_country[country]
        stricto_here = manifest.stricto_by_country.get(country, 0)
        for k in range(total):
            seq += 1
            sample_id = f"zx-{seq:04d}"
            is_stricto = k < stricto_here
            if is_stricto:
                typology = "Zeuxippus Ware"
                group_ref = "grp-stricto"
                sub_period = "Byzantine"
            else:
                typology = rng.choice([
                    "Zeuxippus Ware imitation",
                    "Zeuxippus Ware derivative",
                    "Zeuxippus Ware family",
                ])
                group_ref = rng.choice(other_group_ids) if rng.random() < 0.4 else ""
                sub_period = rng.choice(["Byzantine", "Late Byzantine", None])
            notes = rng.choice([
                "Glazed bowl fragment with incised spiral decoration.",
                "Fine glazed table ware, pale fabric, traces of gouged lines.",
                "Incised and glazed open form; concentric circles on the floor.",
            ])
            did = add_description(sample_id, typology, "FINE", notes)
            dat = dating_id("Medieval", sub_period)
            loc = rng.choice(pools[country])
            attribution = rng.choice(attribution_pool) if is_stricto and rng.random() < 0.5 else ""
            media_ids = add_media(sample_id)
            sample_rows.append([
                sample_id, did, loc, dat, group_ref, ";".join(media_ids),
                "", attribution, "",
            ])
            add_analyses(sample_id)
            realized_typ[country] = realized_typ.get(country, 0) + 1
            if is_stricto:
                realized_str[country] = realized_str.get(country, 0) + 1

    countries = sorted(manifest.typology_by_country)
    noise_total = manifest.total_samples - manifest.zeuxippus_typology_count
    for k in range(noise_total):
        sample_id = f"ns-{k + 1:04d}"
        typology, category = rng.choice(list(manifest.noise_wares))
        period, sub_period = rng.choice(list(manifest.noise_periods))
        notes = rng.choice([
            "Coarse body with abundant quartz inclusions.",
            "Plain rim sherd, undecorated surface.",
            "Soot traces on the exterior wall.",
            "Ribbed body fragment, gritty fabric.",
        ])
        has_description = rng.random() >= 0.05
        did = add_description(sample_id, typology, category, notes) if has_description else ""
        dat = dating_id(period, sub_period) if rng.random() >= 0.1 else ""
        if rng.random() < manifest.gappy_noise_fraction:
            loc = rng.choice(orphan_pool)
        else:
            loc = rng.choice(pools[rng.choice(countries)])
        group_ref = rng.choice(other_group_ids) if rng.random() < 0.3 else ""
        media_ids = add_media(sample_id)
        origin = rng.choice(pools[rng.choice(countries)]) if rng.random() < 0.15 else ""
        sample_rows.append([sample_id, did, loc, dat, group_ref, ";".join(media_ids), origin, "", ""])
        add_analyses(sample_id)

    files = {
        "samples.csv": _csv_bytes(
            ["sample_id", "description_id", "provenance_id", "dating_id", "group_id",
             "media_ids", "supposed_origin_id", "attribution_id", "storage_outside_id"],
            sample_rows,
        ),
        "locations.csv": _csv_bytes(
            ["location_id", "site", "town", "region", "country", "lat", "lon"], location_rows
        ),
        "analyses.csv": _csv_bytes(
            ["analysis_id", "sample_id", "technique", "component", "value", "unit", "run_tag"],
            analysis_rows,
        ),
        "descriptions.csv": _csv_bytes(
            ["description_id", "free_text", "typology", "category", "part_object", "waster", "firing_mode"],
            description_rows,
        ),
        "datings.csv": _csv_bytes(
            ["dating_id", "period", "sub_period", "start_year", "end_year"], dating_rows
        ),
        "groups.csv": _csv_bytes(["group_id", "name", "basis"], group_rows),
        "media.csv": _csv_bytes(["media_id", "kind", "uri", "caption"], media_rows),
    }

    echo = manifest.to_dict()
    echo["derived"] = {
        "sample_count": len(sample_rows),
        "analysis_count": len(analysis_rows),
        "location_count": len(location_rows),
        "description_count": len(description_rows),
        "media_count": len(media_rows),
        "typology_by_country": realized_typ,
        "stricto_by_country": realized_str,
    }
    if realized_typ != dict(manifest.typology_by_country):
        raise InvalidManifest("internal: realized typology distribution diverged")
    if realized_str != {c: n for c, n in manifest.stricto_by_country.items() if n}:
        raise InvalidManifest("internal: realized group distribution diverged")
    return files, echo


def manifest_json(echo: dict) -> bytes:
    return (json.dumps(echo, indent=2, sort_keys=True) + "\n").encode("utf-8")
