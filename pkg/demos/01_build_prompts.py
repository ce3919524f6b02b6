"""Walk through prompt assembly for one review sentence.

Shows the four prefix variants (none, entity-recognition, relation-extraction,
random-word noise) wrapped around the same aspect sentiment task.
"""

from absakit.prefix import (
    build_ner_prefix,
    build_noise_prefix,
    build_re_prefix,
    load_noise_vocabulary,
)
from absakit.prompting import assemble, load_template
from absakit.types import GoldAnswer, Polarity, Subtask, TaskInstance

TEXT = "The sushi was fresh but the service was painfully slow."

instance = TaskInstance(
    instance_id="demo:ATSC:0",
    subtask=Subtask.ATSC,
    text=TEXT,
    target_aspects=["sushi"],
    gold=GoldAnswer.polarity(Polarity.POSITIVE),
    sentence_aspects=[("sushi", 4), ("service", 28)],
)

template = load_template(Subtask.ATSC)
vocab = load_noise_vocabulary()

variants = {
    "no prefix": None,
    "entity recognition": build_ner_prefix(TEXT),
    "relation extraction": build_re_prefix(TEXT, "sushi", "service"),
    "noise (seed 0)": build_noise_prefix(vocab, seed=0, word_count=50),
}

for name, prefix in variants.items():
    bundle = assemble(prefix, template, instance)
    print(f"=== {name} " + "=" * (60 - len(name)))
    print(bundle.prompt_text)
    print()
