import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sherdcube.etl import (
    UNGROUPED_KEY,
    UNKNOWN_KEY,
    DuplicateId,
    MalformedRow,
    MissingFile,
    StarSchema,
    ValidationFailed,
    build_star,
    export_star,
    parse_source,
)
from sherdcube.model import Dataset, Sample, Unknown

from conftest import make_tiny_dataset
from randgen import random_dataset

SAMPLES_HEADER = "sample_id,description_id,provenance_id,dating_id,group_id,media_ids\n"
LOCATIONS_HEADER = "location_id,site,town,region,country,lat,lon\n"
ANALYSES_HEADER = "analysis_id,sample_id,technique,component,value,unit,run_tag\n"


def minimal_bundle(samples="", locations="", analyses=""):
    return {
        "samples.csv": SAMPLES_HEADER + samples,
        "locations.csv": LOCATIONS_HEADER + locations,
        "analyses.csv": ANALYSES_HEADER + analyses,
    }


def brute_force_join(dataset: Dataset) -> list[tuple]:
    """Oracle: join each analysis to its sample's dimension keys by hand."""
    samples = {s.sample_id: s for s in dataset.samples}
    rows = []
    for a in dataset.analyses:
        s = samples[a.sample_ref]
        rows.append((
            a.analysis_id,
            s.sample_id,
            s.provenance_ref,
            s.dating_ref or UNKNOWN_KEY,
            s.description_ref or UNKNOWN_KEY,
            s.group_ref or UNGROUPED_KEY,
            a.value,
            a.unit,
        ))
    return sorted(rows)


class TestParseSource:
    def test_empty_analyses_file_with_header(self):
        bundle = minimal_bundle()
        ds = parse_source(bundle)
        assert ds.analyses == []
        assert ds.samples == []

    def test_non_numeric_value_is_malformed(self):
        bundle = minimal_bundle(
            samples="s1,,L1,,,\n",
            locations="L1,,,,Greece,,\n",
            analyses="a1,s1,CHEMISTRY,Al,abc,wt_percent,r1\n",
        )
        with pytest.raises(MalformedRow) as exc:
            parse_source(bundle)
        assert exc.value.file == "analyses.csv"
        assert exc.value.line == 2
        assert "value" in exc.value.reason

    def test_three_file_bundle_counts(self):
        # oracle: expected record counts are the data line counts of each file
        samples = "".join(f"s{i},,L{i},,,\n" for i in range(10))
        locations = "".join(f"L{i},,,,Greece,,\n" for i in range(10))
        analyses = "".join(
            f"a{i},s{i % 10},CHEMISTRY,Al,{i}.5,wt_percent,r{i}\n" for i in range(25)
        )
        bundle = minimal_bundle(samples, locations, analyses)
        for name in bundle:
            assert bundle[name].count("\n") - 1 == {"samples.csv": 10, "locations.csv": 10, "analyses.csv": 25}[name]
        ds = parse_source(bundle)
        assert (len(ds.samples), len(ds.locations), len(ds.analyses)) == (10, 10, 25)

    def test_missing_required_file(self):
        with pytest.raises(MissingFile) as exc:
            parse_source({"samples.csv": SAMPLES_HEADER, "locations.csv": LOCATIONS_HEADER})
        assert exc.value.name == "analyses.csv"

    def test_duplicate_id(self):
        bundle = minimal_bundle(
            samples="s1,,L1,,,\ns1,,L1,,,\n", locations="L1,,,,Greece,,\n"
        )
        with pytest.raises(DuplicateId) as exc:
            parse_source(bundle)
        assert (exc.value.record_type, exc.value.record_id) == ("Sample", "s1")

    def test_column_order_is_lenient_names_strict(self):
        shuffled = "provenance_id,sample_id,description_id,dating_id,group_id,media_ids\nL1,s1,,,,\n"
        ds = parse_source({
            "samples.csv": shuffled,
            "locations.csv": LOCATIONS_HEADER + "L1,,,,Greece,,\n",
            "analyses.csv": ANALYSES_HEADER,
        })
        assert ds.samples[0].provenance_ref == "L1"

        with pytest.raises(MalformedRow) as exc:
            parse_source({
                "samples.csv": SAMPLES_HEADER.replace("media_ids", "mediaids"),
                "locations.csv": LOCATIONS_HEADER,
                "analyses.csv": ANALYSES_HEADER,
            })
        assert "column" in exc.value.reason

    def test_json_bundle_round_trip(self, tiny_star):
        files = export_star(tiny_star, "json_bundle")
        rebuilt = build_star(parse_source(files, "json_bundle"))
        assert rebuilt == tiny_star


class TestBuildStar:
    def test_empty_dataset_star_has_sentinel_dimensions(self):
        star = build_star(Dataset())
        assert star.facts == ()
        assert star.dim_provenance == {}
        assert list(star.dim_dating) == [UNKNOWN_KEY]
        assert list(star.dim_description) == [UNKNOWN_KEY]
        assert list(star.dim_group) == [UNGROUPED_KEY]

    def test_two_measures_share_all_dimension_keys(self, tiny_star):
        facts = [f for f in tiny_star.facts if f.analysis_id in ("a1", "a3")]
        assert len(facts) == 2
        a, b = facts
        assert (a.provenance_key, a.dating_key, a.description_key, a.group_key) == (
            b.provenance_key, b.dating_key, b.description_key, b.group_key
        )

    def test_grain_one_fact_per_analysis(self, tiny_dataset, tiny_star):
        assert len(tiny_star.facts) == len(tiny_dataset.analyses)

    def test_sentinel_routing(self, tiny_star):
        s4 = [f for f in tiny_star.facts if f.sample_id == "s4"]
        assert s4[0].description_key == UNKNOWN_KEY
        assert s4[0].dating_key == UNKNOWN_KEY
        assert s4[0].group_key == UNGROUPED_KEY

    def test_provenance_rows_materialize_all_levels(self, tiny_star):
        path = tiny_star.dim_provenance["loc-sudak"]
        assert path.site == Unknown("site")
        assert path.town == "Sudak"
        assert path.region == Unknown("region")
        assert path.country == "Ukraine"

    def test_validation_gate(self, tiny_dataset):
        tiny_dataset.samples.append(Sample("s-bad", "loc-nowhere"))
        with pytest.raises(ValidationFailed) as exc:
            build_star(tiny_dataset)
        assert exc.value.report.rules() == {"ref_integrity"}

    def test_random_datasets_match_naive_join(self):
        rng = random.Random(101)
        for _ in range(10):
            ds = random_dataset(rng, max_samples=12, max_analyses=50)
            star = build_star(ds)
            got = sorted(
                (f.analysis_id, f.sample_id, f.provenance_key, f.dating_key,
                 f.description_key, f.group_key, f.value, f.unit)
                for f in star.facts
            )
            assert got == brute_force_join(ds)

    def test_order_determinism(self):
        ds = make_tiny_dataset()
        star = build_star(ds)
        rng = random.Random(3)
        shuffled = Dataset(
            samples=rng.sample(ds.samples, len(ds.samples)),
            locations=rng.sample(ds.locations, len(ds.locations)),
            descriptions=rng.sample(ds.descriptions, len(ds.descriptions)),
            datings=rng.sample(ds.datings, len(ds.datings)),
            groups=rng.sample(ds.groups, len(ds.groups)),
            analyses=rng.sample(ds.analyses, len(ds.analyses)),
            media=rng.sample(ds.media, len(ds.media)),
        )
        assert build_star(shuffled) == star


def test_location_enrichment_hook_is_opt_in(tiny_dataset):
    from dataclasses import replace

    def fill_region(loc):
        if loc.town == "Sudak" and loc.region is None:
            return replace(loc, region="Crimea")
        return loc

    plain = build_star(tiny_dataset)
    assert plain.dim_provenance["loc-sudak"].region == Unknown("region")
    enriched = build_star(tiny_dataset, location_enricher=fill_region)
    assert enriched.dim_provenance["loc-sudak"].region == "Crimea"


class TestExportStar:
    def test_empty_star_headers_only(self):
        files = export_star(build_star(Dataset()))
        assert files["analyses.csv"] == ANALYSES_HEADER.encode()
        for name, data in files.items():
            assert data.decode("utf-8").count("\n") == 1, name

    def test_round_trip_identity(self, tiny_star):
        files = export_star(tiny_star)
        rebuilt = build_star(parse_source(files))
        assert rebuilt == tiny_star

    def test_row_counts(self):
        rng = random.Random(11)
        ds = random_dataset(rng, max_samples=10, max_analyses=40)
        star = build_star(ds)
        files = export_star(star)
        data_lines = files["analyses.csv"].decode().count("\n") - 1
        assert data_lines == len(star.facts)

    def test_random_round_trips(self):
        rng = random.Random(55)
        for _ in range(8):
            star = build_star(random_dataset(rng))
            assert build_star(parse_source(export_star(star))) == star


@st.composite
def small_datasets(draw):
    seed = draw(st.integers(min_value=0, max_value=10_000))
    return random_dataset(random.Random(seed), max_samples=8, max_analyses=25)


@settings(max_examples=40, deadline=None)
@given(ds=small_datasets())
def test_fact_conservation_property(ds):
    star = build_star(ds)
    # one fact per analysis, none dropped or duplicated
    assert len(star.facts) == len(ds.analyses)
    assert {f.analysis_id for f in star.facts} == {a.analysis_id for a in ds.analyses}
    # dimension totality: every key resolves, sentinels included
    for f in star.facts:
        assert f.provenance_key in star.dim_provenance
        assert f.dating_key in star.dim_dating
        assert f.description_key in star.dim_description
        assert f.group_key in star.dim_group
