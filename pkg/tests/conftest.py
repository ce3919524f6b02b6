import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

import datagen  # noqa: E402

from absakit.experiment.cli import main as cli_main  # noqa: E402

SMALL_SIZES = {
    "Lapt14": {"train": 40, "test": 25},
    "Rest14": {"train": 40, "test": 25},
    "Rest15": {"train": 30, "test": 20},
    "ERSA": {"train": 30, "validation": 10, "test": 15},
    "SentiHood": {"train": 120, "test": 40},
}

def ingest_all(files: dict, data_dir: Path) -> None:
    for dataset, splits in files.items():
        argv = ["ingest", "--dataset", dataset, "--data-dir", str(data_dir)]
        for split, path in splits.items():
            argv += [f"--{split}", str(path)]
        rc = cli_main(argv)
        assert rc == 0, f"ingest failed for {dataset}"


@pytest.fixture(scope="session")
def small_corpus(tmp_path_factory):
    """Raw fixture files plus ingested canonical records, small scale."""
    root = tmp_path_factory.mktemp("small")
    files = datagen.build_all(root / "raw", sizes=SMALL_SIZES, seed=11)
    data_dir = root / "data"
    ingest_all(files, data_dir)
    return {"files": files, "data_dir": data_dir}
