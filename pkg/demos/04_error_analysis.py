"""Compare two runs instance by instance and show which errors a prefix fixes.

The baseline backend truncates aspect terms to their first word; the
treatment backend replays gold. The diff report lists every baseline error
fixed by the treatment, side by side with the gold answer.
"""

import tempfile
from pathlib import Path

from absakit.backend import gold_replay_mock, register_mock
from absakit.corpus import records
from absakit.experiment.cli import main as cli

XML = """<?xml version="1.0" encoding="UTF-8"?>
<sentences>
  <sentence id="e:0">
    <text>The battery life is great.</text>
    <aspectTerms>
      <aspectTerm term="battery life" polarity="positive" from="4" to="16"/>
    </aspectTerms>
  </sentence>
  <sentence id="e:1">
    <text>Try the indain food.</text>
    <aspectTerms>
      <aspectTerm term="indain food" polarity="positive" from="8" to="19"/>
    </aspectTerms>
  </sentence>
  <sentence id="e:2">
    <text>The screen is sharp.</text>
    <aspectTerms>
      <aspectTerm term="screen" polarity="positive" from="4" to="10"/>
    </aspectTerms>
  </sentence>
</sentences>
"""


def main() -> None:
    root = Path(tempfile.mkdtemp(prefix="absakit-diff-"))
    (root / "Rest14_test.xml").write_text(XML, "utf-8")
    data_dir = root / "data"
    cli(["ingest", "--dataset", "Rest14", "--test", str(root / "Rest14_test.xml"),
         "--data-dir", str(data_dir)])

    answers = {
        inst.instance_id: inst.gold.render()
        for inst in records.read_instances(data_dir / "Rest14" / "ATE" / "test.ndjson")
    }
    truncated = {k: v.split(" ")[0] for k, v in answers.items()}
    base_ep = gold_replay_mock(truncated, name="diff-base")
    treat_ep = gold_replay_mock(answers, name="diff-treat")

    for tag, endpoint, prefixes in (
        ("base", base_ep, '["NoPrefix"]'),
        ("treat", treat_ep, '["NER"]'),
    ):
        config = root / f"{tag}.json"
        config.write_text(f"""{{
          "data_dir": "{data_dir}",
          "output_dir": "{root / tag}",
          "datasets": ["Rest14"],
          "subtasks": ["ATE"],
          "prefix_kinds": {prefixes},
          "seeds": [0],
          "backend": {{"endpoint": "{endpoint}"}}
        }}""")
        cli(["run", "--config", str(config)])

    cli(["diff-errors",
         "--baseline", str(root / "base" / "Rest14" / "ATE" / "NoPrefix" / "0"),
         "--treatment", str(root / "treat" / "Rest14" / "ATE" / "NER" / "0")])


if __name__ == "__main__":
    main()
