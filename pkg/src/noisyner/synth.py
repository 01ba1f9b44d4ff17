"""
Seeded generator for the small synthetic tweet corpus bundled in data/synthetic.

The corpus mimics the shape of the real task: a larger labeled set from an
older epoch, smaller newer dev/test sets whose entity inventory has drifted,
unlabeled text for clustering, and a few gazetteers with a manifest.

    python -m noisyner.synth OUTDIR [--seed N]
"""
from __future__ import annotations

import argparse
import os
import random

ENTITIES = {
    "2010": {
        "person": ["Justin Bieber", "Lady Gaga", "Kanye West", "Taylor Swift", "Obama", "Oprah"],
        "geo-loc": ["London", "New York", "Texas", "Chicago", "Paris", "Boston"],
        "company": ["Apple", "Google", "Starbucks", "Twitter", "Nike"],
        "product": ["iPhone", "Xbox 360", "PlayStation", "iPod"],
        "sportsteam": ["Yankees", "Lakers", "Red Sox", "Celtics"],
        "other": ["Christmas", "Halloween", "Super Bowl", "Thanksgiving"],
        "facility": ["Madison Square Garden", "Wembley", "the Met"],
        "movie": ["Inception", "Toy Story 3", "Avatar"],
        "musicartist": ["Kings of Leon", "Green Day", "Paramore"],
        "tvshow": ["Glee", "Jersey Shore", "American Idol"],
    },
    "2015": {
        "person": ["Adele", "Ed Sheeran", "Kim Kardashian", "Taylor Swift", "Bernie Sanders"],
        "geo-loc": ["London", "Brooklyn", "Denver", "Seattle", "Sheffield"],
        "company": ["Uber", "Apple", "Snapchat", "Netflix"],
        "product": ["Apple Watch", "iPhone 6", "Xbox One", "PS4"],
        "sportsteam": ["Warriors", "Patriots", "Astros", "Padres"],
        "other": ["Halloween", "Black Friday", "Comic Con", "Christmas"],
        "facility": ["Wembley", "Barclays Center", "Fenway Park"],
        "movie": ["Star Wars", "Jurassic World", "Spectre"],
        "musicartist": ["One Direction", "Fall Out Boy", "Coldplay"],
        "tvshow": ["Empire", "Game of Thrones", "Walking Dead"],
    },
}

TEMPLATES = [
    "omg {person} is coming to {geo-loc} tonight !",
    "just bought a new {product} from {company} lol",
    "watching {tvshow} with my mom",
    "cant wait for {other} #excited",
    "{sportsteam} beat the {sportsteam} again",
    "going to see {movie} at {facility} tomorrow",
    "listening to {musicartist} all day",
    "good morning everyone {url}",
    "i love {person} so much",
    "happy {other} from {geo-loc} !",
    "{company} is down again ugh",
    "new {product} review {url}",
    "{mention} are you going to {facility} ?",
    "so bored at work today",
    "{person} and {person} at {other} party",
    "heading to {geo-loc} with {mention}",
    "who else is watching {tvshow} tonight",
    "{musicartist} live at {facility} was amazing",
    "lol that is so true {mention}",
    "rt {mention} : {company} announces new {product}",
]

GAZETTEERS = [
    ("Freebase_person", "person.txt", "name", "person", "person"),
    ("Freebase_location", "location.txt", "name", "geo-loc", "geo-loc"),
    ("Freebase_businessoperation", "company.txt", "name", "company", "company"),
    ("Freebase_videogameplatform", "videogameplatform.txt", "name", "product", None),
    ("Freebase_holiday", "holiday.txt", "name", "other", "other"),
    ("Freebase_tvprogram", "tvprogram.txt", "alias", "tvshow", "tvshow"),
]


def _fill(template, pool, rng):
    tokens, labels = [], []
    for part in template.split():
        if part.startswith("{") and part.endswith("}"):
            slot = part[1:-1]
            if slot == "url":
                tokens.append("http://t.co/{}".format(rng.randint(1000, 9999)))
                labels.append("O")
                continue
            if slot == "mention":
                tokens.append("@user{}".format(rng.randint(1, 99)))
                labels.append("O")
                continue
            words = rng.choice(pool[slot]).split()
            if rng.random() < 0.2:
                words = [w.lower() for w in words]
            for k, w in enumerate(words):
                tokens.append(w)
                labels.append(("B-" if k == 0 else "I-") + slot)
        else:
            tokens.append(part)
            labels.append("O")
    return tokens, labels


def sentences(epoch, n, rng):
    pool = ENTITIES[epoch]
    return [_fill(rng.choice(TEMPLATES), pool, rng) for _ in range(n)]


def _write_conll(path, sents):
    with open(path, "w", encoding="utf-8") as f:
        f.write("\n".join("".join("{}\t{}\n".format(t, l) for t, l in zip(*s)) for s in sents))


def generate(outdir, seed=2015, n_old=120, n_dev=40, n_test=40, n_unlabeled=1500):
    """Write the corpus files into outdir; returns the list of file names."""
    rng = random.Random(seed)
    os.makedirs(outdir, exist_ok=True)
    _write_conll(os.path.join(outdir, "train_2010.conll"), sentences("2010", n_old, rng))
    _write_conll(os.path.join(outdir, "dev_2015.conll"), sentences("2015", n_dev, rng))
    _write_conll(os.path.join(outdir, "test_2015.conll"), sentences("2015", n_test, rng))
    with open(os.path.join(outdir, "unlabeled.txt"), "w", encoding="utf-8") as f:
        for i in range(n_unlabeled):
            toks, _ = _fill(rng.choice(TEMPLATES), ENTITIES["2010" if i % 2 else "2015"], rng)
            f.write(" ".join(toks) + "\n")
    with open(os.path.join(outdir, "gazetteers.tsv"), "w", encoding="utf-8") as man:
        for source, fname, kind, ne_type, slot in GAZETTEERS:
            if slot is None:
                names = ["Xbox 360", "Xbox One", "PlayStation", "PS4", "Wii"]
            else:
                names = sorted(set(ENTITIES["2010"][slot]) | set(ENTITIES["2015"][slot]))
                names = names[: max(1, int(len(names) * 0.7))]
            with open(os.path.join(outdir, fname), "w", encoding="utf-8") as g:
                g.write("".join(n + "\n" for n in names))
            man.write("{}\t{}\t{}\t{}\n".format(source, fname, kind, ne_type))
    return sorted(os.listdir(outdir))


def main(argv=None):
    p = argparse.ArgumentParser(description="write the synthetic tweet NER corpus")
    p.add_argument("outdir")
    p.add_argument("--seed", type=int, default=2015)
    args = p.parse_args(argv)
    for name in generate(args.outdir, args.seed):
        print(name)


if __name__ == "__main__":
    main()
