"""Run the full pipeline on a tiny inline corpus with a gold-replay backend.

Writes a two-domain restaurant/laptop fixture, ingests it into canonical
records, runs aspect term extraction against a mock that answers every
prompt with the gold string, and prints the (perfect) scores.
"""

import tempfile
from pathlib import Path

from absakit.backend import gold_replay_mock
from absakit.corpus import records
from absakit.experiment.cli import main as cli

REST_XML = """<?xml version="1.0" encoding="UTF-8"?>
<sentences>
  <sentence id="r:0">
    <text>The wine list is extensive and the staff is friendly.</text>
    <aspectTerms>
      <aspectTerm term="wine list" polarity="positive" from="4" to="13"/>
      <aspectTerm term="staff" polarity="positive" from="35" to="40"/>
    </aspectTerms>
  </sentence>
  <sentence id="r:1">
    <text>Service was slow.</text>
    <aspectTerms>
      <aspectTerm term="Service" polarity="negative" from="0" to="7"/>
    </aspectTerms>
  </sentence>
  <sentence id="r:2">
    <text>We will come back for sure.</text>
  </sentence>
</sentences>
"""


def main() -> None:
    root = Path(tempfile.mkdtemp(prefix="absakit-demo-"))
    raw = root / "Rest14_test.xml"
    raw.write_text(REST_XML, "utf-8")
    data_dir = root / "data"

    cli(["ingest", "--dataset", "Rest14", "--test", str(raw),
         "--data-dir", str(data_dir)])

    answers = {
        inst.instance_id: inst.gold.render()
        for inst in records.read_instances(data_dir / "Rest14" / "ATE" / "test.ndjson")
    }
    endpoint = gold_replay_mock(answers, name="demo-gold")

    config = root / "config.json"
    config.write_text(f"""{{
      "data_dir": "{data_dir}",
      "output_dir": "{root / 'out'}",
      "datasets": ["Rest14"],
      "subtasks": ["ATE"],
      "prefix_kinds": ["NoPrefix", "NER", "Noise"],
      "seeds": [0, 1],
      "backend": {{"endpoint": "{endpoint}"}}
    }}""")

    cli(["run", "--config", str(config)])
    cli(["report", "--config", str(config)])
    print(f"\nartifacts under {root / 'out'}")


if __name__ == "__main__":
    main()
