#!/usr/bin/env python3
"""Regenerate the synthetic demo corpus under fixtures/demo/.

The texts are gibberish with language-flavored vocabularies, but their
punctuation is placed so that word counts between consecutive marks follow
a discrete Weibull law with per-text parameters. Translations into English
are generated with parameters inside the English originals' parameter
range. Deterministic: fixed seed per text id.

Run from the repository root:  python3 tools/make_demo_fixtures.py
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

ROOT = Path(__file__).resolve().parent.parent
OUT = ROOT / "fixtures" / "demo"

VOCAB = {
    "en": """the of and to a in that it was he she for on as with his her they at be
    this from or one had by word but not what all were when we there can an your
    which their said if will each about how up out them then she many some so
    these would other into has more two like him see time could no make than
    first been its who now people my made over did down only way find use may
    water long little very after called just where most know get through back
    much before go good new write our used me man too any day same right look
    think also around another came come work three must because does part even
    place well such here take why things help put years different away again""".split(),
    "de": """der die das und zu ein eine in den von mit sich des auf für ist im dem
    nicht ein als auch es an werden aus er hat dass sie nach wird bei einer um
    ihn noch wie einem über einen so zum war haben nur oder aber vor zur bis
    mehr durch man sein wurde sei Haus Jahr Zeit Leben Welt Hand Stadt Herr
    Weg Auge Wasser Berg Wald Nacht Morgen Abend Licht Wort Mensch Kind Frau
    Vater Mutter Bruder Himmel Erde Wind Stein Blume Vogel Pferd Brot Tisch""".split(),
    "pl": """nie to się w na i z co jest że do tak jak o mnie a po ale mi za już
    ja od pan tym tego ci tu jego czy tylko tam tej tych tę był była było być
    przez tam tutaj dom rok czas życie świat ręka miasto droga oko woda góra
    las noc rano wieczór światło słowo człowiek dziecko kobieta ojciec matka
    brat niebo ziemia wiatr kamień kwiat ptak koń chleb stół okno drzwi serce""".split(),
}

ABBREV_USE = {
    "en": ["Mr.", "Mrs.", "Dr.", "St."],
    "de": ["Dr.", "z.B.", "Nr."],
    "pl": ["np.", "itd.", "dr"],
}

NAMES = {
    "en": ["Bumble", "Harlow", "Pinch", "Quill", "Marsh"],
    "de": ["Vogel", "Brandt", "Eichel", "Falk"],
    "pl": ["Kowal", "Lipka", "Sosna", "Wrona"],
}

# (text_id, language, group, translation_of, p, beta, n_words_target, seed)
TEXTS = [
    ("en_meadow",     "en", "original",    None,           0.100, 1.30, 5600, 101),
    ("en_harbor",     "en", "original",    None,           0.110, 1.34, 5800, 102),
    ("en_orchard",    "en", "original",    None,           0.120, 1.38, 5400, 103),
    ("de_wanderung",  "de", "original",    None,           0.088, 1.16, 5600, 201),
    ("de_uferpfad",   "de", "original",    None,           0.092, 1.20, 5500, 202),
    ("de_nachtzug",   "de", "original",    None,           0.096, 1.22, 5700, 203),
    ("pl_mazurka",    "pl", "original",    None,           0.128, 1.44, 5500, 301),
    ("pl_jezioro",    "pl", "original",    None,           0.136, 1.50, 5400, 302),
    ("tr_en_mazurka", "en", "translation", "pl_mazurka",   0.108, 1.33, 5600, 401),
    ("tr_en_wanderung", "en", "translation", "de_wanderung", 0.112, 1.35, 5700, 402),
]

MARKS = [",", ".", "?", "!", "…", ":", ";", "—"]
MARK_P = [0.55, 0.28, 0.03, 0.02, 0.01, 0.04, 0.04, 0.03]
STOPS = {".", "?", "!", "…"}


def draw_interval(rng, p, beta):
    u = 1.0 - rng.random()
    t = (math.log(u) / math.log1p(-p)) ** (1.0 / beta)
    return int(t) + 1


def make_text(lang, p, beta, n_words, seed):
    rng = np.random.default_rng(seed)
    vocab = VOCAB[lang]
    weights = 1.0 / np.arange(1, len(vocab) + 1) ** 0.9
    weights /= weights.sum()
    out = []
    words_done = 0
    sent_in_par = 0
    par_len = rng.integers(3, 8)
    sentence_open = False
    dialogue = False
    while words_done < n_words:
        if not sentence_open:
            if sent_in_par >= par_len:
                out.append("\n\n")
                sent_in_par = 0
                par_len = rng.integers(3, 8)
                dialogue = rng.random() < 0.12
                if dialogue:
                    # dialogue dash opening the paragraph
                    out.append("— " if lang != "en" else "“")
            sentence_open = True
            first = True
        k = draw_interval(rng, p, beta)
        chunk = []
        for _ in range(k):
            w = vocab[rng.choice(len(vocab), p=weights)]
            r = rng.random()
            if first and chunk == []:
                if r < 0.05:
                    chunk.append(rng.choice(ABBREV_USE[lang]))
                    chunk.append(rng.choice(NAMES[lang]))
                else:
                    chunk.append(w.capitalize())
            elif r < 0.01:
                chunk.append(rng.choice(ABBREV_USE[lang]) + " " + rng.choice(NAMES[lang]))
            elif r < 0.015 and lang == "en":
                chunk.append(f"{rng.integers(1, 20)},{rng.integers(100, 999)}")
            else:
                chunk.append(w)
        first = False
        words_done += k
        mark = MARKS[rng.choice(len(MARKS), p=MARK_P)]
        sep = " " if mark == "—" else ""
        out.append(" ".join(chunk) + sep + mark + " ")
        if mark in STOPS:
            if dialogue and lang == "en" and rng.random() < 0.5:
                out.append("” ")
                dialogue = False
            sentence_open = False
            sent_in_par += 1
    return "".join(out).rstrip() + "\n"


def main():
    texts_dir = OUT / "texts"
    texts_dir.mkdir(parents=True, exist_ok=True)
    manifest_lines = []
    for text_id, lang, group, src, p, beta, n_words, seed in TEXTS:
        body = make_text(lang, p, beta, n_words, seed)
        (texts_dir / f"{text_id}.txt").write_text(body, encoding="utf-8")
        rec = {
            "path": f"texts/{text_id}.txt",
            "text_id": text_id,
            "language_code": lang,
            "group": group,
        }
        if src:
            rec["translation_of"] = src
        manifest_lines.append(json.dumps(rec, sort_keys=True))
        print(f"{text_id}: {len(body.split())} tokens")
    (OUT / "manifest.jsonl").write_text("\n".join(manifest_lines) + "\n", encoding="utf-8")
    print(f"wrote {OUT / 'manifest.jsonl'}")


if __name__ == "__main__":
    main()
