import pytest

from scale_bench.corpus import Manifesto, Statement, build_corpus


def make_manifesto(mid, codes, country="DE", language="de", year=2015, month=6,
                   party="p1", texts=None):
    statements = tuple(
        Statement(
            id=f"{mid}-s{i}",
            text=texts[i] if texts else f"statement {i} of {mid}",
            code=code,
            manifesto_id=mid,
            position=i,
        )
        for i, code in enumerate(codes)
    )
    return Manifesto(id=mid, party=party, country=country, language=language,
                     year=year, month=month, statements=statements)


@pytest.fixture
def tiny_corpus():
    return build_corpus([
        make_manifesto("m1", ["104", "104", "501", "106"], country="DE", language="de",
                       year=2018),
        make_manifesto("m2", ["202", "403", "0", "605", "605"], country="FR",
                       language="fr", year=2019),
        make_manifesto("m3", ["501", "501"], country="DE", language="de", year=2021),
    ])
