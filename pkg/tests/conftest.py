import pytest

from sherdcube.cube import build_cube
from sherdcube.etl import build_star, parse_source
from sherdcube.generator import default_manifest, generate
from sherdcube.model import (
    AnalysisResult,
    ChemicalGroup,
    Dataset,
    Dating,
    Description,
    LocationRef,
    MediaRef,
    Sample,
)


def make_tiny_dataset() -> Dataset:
    """Handcrafted dataset: gappy locations, sentinel refs, repeated runs."""
    ds = Dataset()
    ds.locations = [
        LocationRef("loc-athens", site="Agora excavation", town="Athens",
                    region="Attica", country="Greece", latitude=37.97, longitude=23.72),
        LocationRef("loc-sudak", town="Sudak", country="Ukraine"),
        LocationRef("loc-acre", town="Acre", country="Israel"),
        LocationRef("loc-wreck", site="Shipwreck trench"),
    ]
    ds.datings = [
        Dating("dat-med", "Medieval", "Byzantine", 500, 1500),
        Dating("dat-rom", "Roman"),
    ]
    ds.descriptions = [
        Description("d1", "Glazed bowl, incised decoration.", "Zeuxippus Ware", "FINE"),
        Description("d2", "plain sherd", "Common ware", "COMM."),
        Description("d3", "", "Cooking pot", "COOK.", part_object="rim",
                    waster=True, firing_mode="mode A"),
    ]
    ds.groups = [
        ChemicalGroup("g1", "Zeuxippus Ware stricto sensu"),
        ChemicalGroup("g2", "Aegean group", "petrographic"),
    ]
    ds.media = [MediaRef("m1", "photo", "media/s3.jpg", "front view")]
    ds.samples = [
        Sample("s1", "loc-athens", description_ref="d1", dating_ref="dat-med", group_ref="g1"),
        Sample("s2", "loc-sudak", description_ref="d1", dating_ref="dat-med"),
        Sample("s3", "loc-acre", description_ref="d2", dating_ref="dat-rom",
               group_ref="g2", media=("m1",)),
        Sample("s4", "loc-wreck"),
    ]
    ds.analyses = [
        AnalysisResult("a1", "s1", "CHEMISTRY", "Al", 10.0, "wt_percent", "r1"),
        AnalysisResult("a2", "s1", "CHEMISTRY", "Al", 12.5, "wt_percent", "r2"),
        AnalysisResult("a3", "s1", "CHEMISTRY", "Ca", 8.0, "wt_percent", "r1"),
        AnalysisResult("a4", "s2", "CHEMISTRY", "Al", 11.0, "wt_percent", "r1"),
        AnalysisResult("a5", "s3", "PETRO", "inclusion_density", 3.5, "dimensionless", "r1"),
        AnalysisResult("a6", "s4", "CHEMISTRY", "Sr", 250.0, "ppm", "r1"),
    ]
    return ds


@pytest.fixture
def tiny_dataset() -> Dataset:
    return make_tiny_dataset()


@pytest.fixture
def tiny_star(tiny_dataset):
    return build_star(tiny_dataset)


@pytest.fixture
def tiny_cube(tiny_star):
    return build_cube(tiny_star)


@pytest.fixture(scope="session")
def acceptance_bundle():
    files, echo = generate(default_manifest())
    return files, echo


@pytest.fixture(scope="session")
def acceptance_star(acceptance_bundle):
    files, _ = acceptance_bundle
    return build_star(parse_source(files))


@pytest.fixture(scope="session")
def acceptance_cube(acceptance_star):
    return build_cube(acceptance_star)
