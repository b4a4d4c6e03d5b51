import random
import string

from nagatag.corpus import Sentence, TaggedCorpus, TagSet, Token


def make_random_corpus(
    rng: random.Random,
    tagset: TagSet,
    n_sentences: int,
    max_len: int = 8,
) -> TaggedCorpus:
    """Small random corpus for round-trip and split tests."""
    sentences = []
    for _ in range(n_sentences):
        n = rng.randint(1, max_len)
        tokens = tuple(
            Token(
                "".join(rng.choices(string.ascii_lowercase, k=rng.randint(1, 6))),
                rng.randrange(len(tagset)),
            )
            for _ in range(n)
        )
        sentences.append(Sentence(tokens))
    return TaggedCorpus(tuple(sentences))
