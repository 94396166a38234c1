#!/usr/bin/env python3
"""Regenerate the bundled sample corpora.

    python3 samples/generate.py

Writes vis_s.jsonl (source collection, visualization research) and
dh_t.jsonl (target collection, digital humanities), plus a ten-document
pair tiny_s.jsonl / tiny_t.jsonl. Output is deterministic.
"""

import json
import random
from pathlib import Path

HERE = Path(__file__).resolve().parent

# Keyword pools per research theme. Themes marked shared appear in both
# collections and bridge them.
VIS_THEMES = {
    "text": ["text visualization", "topic modeling", "latent Dirichlet allocation", "word embeddings",
             "document clustering", "text analytics", "sentiment analysis", "named entity recognition"],
    "graph": ["graph drawing", "node-link diagrams", "force-directed layout", "edge bundling",
              "adjacency matrix", "network analysis", "hierarchical clustering", "graph sampling"],
    "eval": ["user study", "controlled experiment", "perceptual evaluation", "crowdsourcing",
             "eye tracking", "task taxonomy", "insight-based evaluation", "think-aloud protocol"],
    "volume": ["volume rendering", "transfer functions", "isosurface extraction", "GPU ray casting",
               "scalar fields", "flow visualization", "streamlines", "tensor fields"],
    "interaction": ["brushing and linking", "coordinated multiple views", "focus+context",
                    "zoomable interfaces", "dynamic queries", "semantic interaction", "provenance tracking"],
    "ml": ["dimensionality reduction", "t-SNE", "projection methods", "explainable machine learning",
           "model visualization", "neural network visualization", "active learning", "cluster analysis"],
    "time": ["time-series visualization", "temporal patterns", "event sequences", "storytelling",
             "animated transitions", "calendar views", "streamgraphs"],
}

DH_THEMES = {
    "literature": ["distant reading", "close reading", "literary analysis", "poetry", "novels",
                   "stylometry", "authorship attribution", "text reuse"],
    "history": ["historical archives", "digitised manuscripts", "prosopography", "historical maps",
                "chronologies", "humanities scholarship", "cultural heritage", "museum collections"],
    "linguistics": ["corpus linguistics", "historical linguistics", "dialectology", "lexicography",
                    "parallel corpora", "annotation schemes", "TEI encoding"],
    "music": ["musicology", "music scores", "folk songs", "performance analysis"],
}

# Keywords used by both communities, grouped by the themes that borrow them.
# They land in class b and give a-concepts and c-concepts shared contexts.
BRIDGE = {
    "text": ["text visualization", "word clouds", "close reading"],
    "literature": ["text visualization", "word clouds", "close reading"],
    "linguistics": ["text visualization", "word clouds"],
    "graph": ["network visualization", "interactive visualization"],
    "history": ["network visualization", "geospatial visualization", "timeline visualization"],
    "time": ["timeline visualization", "uncertainty visualization"],
    "music": ["timeline visualization", "interactive visualization"],
    "ml": ["interactive visualization", "uncertainty visualization"],
    "eval": ["interactive visualization"],
    "volume": ["uncertainty visualization"],
    "interaction": ["interactive visualization", "geospatial visualization"],
}

AUTHORS = ["A. Okafor", "B. Lindqvist", "C. Moreau", "D. Nakamura", "E. Kowalski", "F. Haddad",
           "G. Silva", "H. Brennan", "I. Petrova", "J. Chen", "K. Adeyemi", "L. Rossi", "M. Varga",
           "N. Iyer", "O. Fischer", "P. Duarte", "Q. Zhao", "R. Novak", "S. Mensah", "T. Keller"]

VIS_VENUES = ["IEEE VIS", "EuroVis", "PacificVis", "IEEE TVCG"]
DH_VENUES = ["VIS4DH", "Digital Humanities Quarterly", "DH Conference"]

TITLE_WORDS = {
    "text": "Text", "graph": "Graph", "eval": "Evaluation", "volume": "Volume", "interaction": "Interaction",
    "ml": "Model", "time": "Temporal", "literature": "Literary", "history": "Historical",
    "linguistics": "Linguistic", "music": "Musical",
}


# Visualization themes a humanities theme borrows method keywords from.
BORROW = {
    "literature": ["text"],
    "history": ["time", "graph"],
    "linguistics": ["text", "ml"],
    "music": ["time", "interaction"],
}


def make_doc(rng, prefix, idx, themes, venues, bridge_rate, extra_pool, borrow_rate=0.0):
    theme = rng.choice(sorted(themes))
    borrows = theme in BORROW and rng.random() < borrow_rate
    own = rng.randint(2, 3) if borrows else rng.randint(3, 5)
    keywords = rng.sample(themes[theme], min(len(themes[theme]), own))
    if borrows:
        source = VIS_THEMES[rng.choice(BORROW[theme])][:4]
        keywords += rng.sample(source, rng.randint(2, 3))
    if rng.random() < 0.35:
        other = rng.choice(sorted(set(themes) - {theme}))
        keywords += rng.sample(themes[other], 1)
    if rng.random() < bridge_rate:
        pool = BRIDGE[theme]
        keywords += rng.sample(pool, min(len(pool), rng.randint(1, 2)))
    if extra_pool and rng.random() < 0.3:
        keywords += rng.sample(extra_pool, 1)
    keywords = list(dict.fromkeys(keywords))
    title = f"{TITLE_WORDS[theme]} {rng.choice(['Analysis', 'Exploration', 'Methods', 'Case Study', 'Toolkit'])}" \
            f" for {keywords[0].capitalize()}"
    return {
        "id": f"{prefix}-{idx:03d}",
        "title": title,
        "authors": rng.sample(AUTHORS, rng.randint(1, 4)),
        "year": rng.randint(2010, 2019),
        "venue": rng.choice(venues),
        "keywords": keywords,
    }


def write(path, docs):
    with open(path, "w", encoding="utf-8") as f:
        for d in docs:
            f.write(json.dumps(d, ensure_ascii=False) + "\n")


def main():
    rng = random.Random(20191020)
    vis_extra = ["visual analytics", "visualization"]
    dh_extra = ["visualization", "digital humanities"]
    vis = [make_doc(rng, "vis", i, VIS_THEMES, VIS_VENUES, 0.5, vis_extra) for i in range(90)]
    dh = [make_doc(rng, "dh", i, DH_THEMES, DH_VENUES, 0.6, dh_extra, 0.7) for i in range(40)]
    write(HERE / "vis_s.jsonl", vis)
    write(HERE / "dh_t.jsonl", dh)

    tiny = random.Random(7)
    tiny_vis = [make_doc(tiny, "tvis", i, VIS_THEMES, VIS_VENUES, 0.5, vis_extra) for i in range(6)]
    tiny_dh = [make_doc(tiny, "tdh", i, DH_THEMES, DH_VENUES, 0.8, dh_extra, 0.7) for i in range(4)]
    write(HERE / "tiny_s.jsonl", tiny_vis)
    write(HERE / "tiny_t.jsonl", tiny_dh)


if __name__ == "__main__":
    main()
