"""Cross-domain evaluation: prompts built for one domain, scored on another.

Builds laptop and restaurant fixtures, then runs the laptop-to-restaurant
transfer cell. The endpoint string may carry placeholders such as
{train_dataset} so that each training domain can route to its own
fine-tuned serving instance.
"""

import sys
import tempfile
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))
import datagen  # synthetic fixture generator shared with the test suite

from absakit.backend import gold_replay_mock
from absakit.corpus import records
from absakit.experiment.cli import main as cli

SIZES = {"Lapt14": {"train": 20, "test": 12}, "Rest14": {"train": 20, "test": 12}}


def main() -> None:
    root = Path(tempfile.mkdtemp(prefix="absakit-ood-"))
    files = datagen.build_all(root / "raw", sizes=SIZES, seed=3)
    data_dir = root / "data"
    for dataset, splits in files.items():
        argv = ["ingest", "--dataset", dataset, "--data-dir", str(data_dir)]
        for split, path in splits.items():
            argv += [f"--{split}", str(path)]
        cli(argv)

    answers = {
        inst.instance_id: inst.gold.render()
        for inst in records.read_instances(data_dir / "Rest14" / "ATE" / "test.ndjson")
    }
    endpoint = gold_replay_mock(answers, name="ood-gold")

    config = root / "config.json"
    config.write_text(f"""{{
      "data_dir": "{data_dir}",
      "output_dir": "{root / 'out'}",
      "datasets": ["Lapt14"],
      "subtasks": ["ATE"],
      "prefix_kinds": ["NoPrefix", "NER"],
      "seeds": [0],
      "train_domain": "Lapt14",
      "test_domain": "Rest14",
      "backend": {{"endpoint": "{endpoint}"}}
    }}""")

    cli(["run-ood", "--config", str(config)])
    print(f"\ncells under {root / 'out' / 'ood'}")


if __name__ == "__main__":
    main()
