"""Default stopword sets and a loader for user-supplied lists.

The default set is a standard English stopword list combined with the Java
reserved words, since Java source is the default corpus language and its
keywords carry no retrieval signal. Tokenization splits on punctuation, so
apostrophe contractions are listed by their alphabetic fragments.
"""

from __future__ import annotations

from pathlib import Path

ENGLISH_STOPWORDS = frozenset("""
a about above after again against ain all am an and any are aren as at
be because been before being below between both but by
can couldn
d did didn do does doesn doing don down during
each
few for from further
had hadn has hasn have haven having he her here hers herself him himself his
how
i if in into is isn it its itself
just
ll
m ma me mightn more most mustn my myself
needn no nor not now
o of off on once only or other our ours ourselves out over own
re
s same shan she should shouldn so some such
t than that the their theirs them themselves then there these they this
those through to too
under until up
ve very
was wasn we were weren what when where which while who whom why will with
won wouldn
y you your yours yourself yourselves
""".split())

JAVA_KEYWORDS = frozenset("""
abstract assert boolean break byte case catch char class const continue
default do double else enum extends final finally float for goto if
implements import instanceof int interface long native new package private
protected public return short static strictfp super switch synchronized
this throw throws transient try void volatile while
true false null
""".split())

DEFAULT_STOPWORDS = ENGLISH_STOPWORDS | JAVA_KEYWORDS


def load_stopwords(path: str | Path) -> frozenset[str]:
    """Read a stopword list, one term per line; blank lines are skipped.

    Entries are lowercased so the set meets the normalizer's contract.
    """
    terms = set()
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            term = line.strip().lower()
            if term:
                terms.add(term)
    return frozenset(terms)
