#!/usr/bin/env python3
"""Regenerates the synthetic dataset and score-table fixtures.

The first five Social Progress rows reproduce the recorded worksheet; the
remaining 55 rows are synthetic and balanced so that a full batch run
archives exactly 30 of 60 papers.
"""
import csv
import pathlib

HERE = pathlib.Path(__file__).parent

SOCP_TABLE = [
    # url, title, pages, r1, r1_rec, r2, r2_verdict
    ("https://www.kaggle.com/datasets/nandinivishwanathan/social-progress-index/",
     "Beyond GDP: A Multi-Dimensional Analysis of Global Social Progress",
     10, 7.0, "Weak Accept", 8.0, "Weak Accept"),
    ("https://www.kaggle.com/datasets/itsujitsharma/student-stress-monitoring-dataset",
     "Beyond the Breaking Point: Mapping Stress Dynamics & Resilience Pathways in Students",
     9, 8.0, "Weak Accept", 8.0, "Weak Accept"),
    ("https://stats.oecd.org/Index.aspx?DataSetCode=BLI",
     "Analysis of Well-Being Across OECD Countries Using the Better Life Index",
     7, 7.0, "Accept", 4.0, "Reject"),
    ("https://www.kaggle.com/datasets/unsdsn/world-happiness",
     "Beyond GDP: Social Connections & Freedom as Drivers of Wellbeing (WHR 2024)",
     9, 7.0, "Weak Accept", 5.0, "Reject"),
    ("https://www.kaggle.com/datasets/l3llff/japan-life-expectancy",
     "Upstream Drivers of Longevity: Education, Earnings, & Work-Time in Japan",
     8, 8.0, "Accept", 5.0, "Reject"),
]

TRACKS = [
    ("Social Progress", "SOCP", 1, "socp"),
    ("Productive Economies", "PROE", 2, "proe"),
    ("Precision Health", "PREH", 3, "preh"),
    ("Sustainability", "SUST", 4, "sust"),
    ("Artificial Intelligence", "ARTI", 5, "arti"),
]

TOPICS = {
    "socp": ["community-wellbeing-survey", "urban-mobility-equity",
             "education-access-index", "housing-affordability-panel",
             "civic-participation-records", "digital-inclusion-tracker",
             "public-library-usage"],
    "proe": ["regional-trade-flows", "small-business-registry",
             "labor-productivity-panel", "supply-chain-latency",
             "agricultural-yield-records", "industrial-energy-use",
             "freight-corridor-volumes", "startup-funding-rounds",
             "retail-price-observatory", "port-throughput-logs",
             "manufacturing-defect-rates", "tourism-seasonality-index"],
    "preh": ["clinical-readmission-cohort", "wearable-activity-traces",
             "nutrition-intake-diaries", "sleep-quality-sensors",
             "vaccination-coverage-atlas", "telehealth-adoption-survey",
             "chronic-care-pathways", "maternal-health-registry",
             "air-quality-respiratory-visits", "pharmacy-dispensing-logs",
             "screening-participation-rates", "hospital-wait-times"],
    "sust": ["urban-heat-islands", "watershed-quality-samples",
             "renewable-generation-hourly", "soil-carbon-plots",
             "fisheries-catch-records", "recycling-stream-audit",
             "forest-cover-change", "coastal-erosion-transects",
             "building-retrofit-energy", "species-sighting-atlas",
             "drought-stress-indicators", "municipal-waste-composition"],
    "arti": ["model-benchmark-suites", "annotation-disagreement-study",
             "inference-latency-profiles", "synthetic-data-quality",
             "prompt-robustness-corpus", "hardware-efficiency-runs",
             "dataset-shift-monitors", "evaluation-rubric-bank",
             "multilingual-coverage-audit", "embedding-drift-traces",
             "training-curriculum-logs", "failure-taxonomy-corpus"],
}

ACCEPT = (7.5, "Accept", 7.5, "Weak Accept")
REJECT = (6.0, "Weak Accept", 4.0, "Reject")


def title_for(slug: str, track_name: str) -> str:
    words = slug.replace("-", " ").title()
    return f"{words}: An Empirical Study for {track_name}"


def main() -> None:
    datasets, scores = [], []

    for track_name, code, num, key in TRACKS:
        rows = []
        if code == "SOCP":
            for url, title, pages, r1, r1rec, r2, r2v in SOCP_TABLE:
                rows.append((url, title, pages, r1, r1rec, r2, r2v))
            # 7 synthetic SOCP rows: 4 accepts, 3 rejects -> 6/6 in track.
            for i, slug in enumerate(TOPICS["socp"]):
                url = f"https://data.example.org/{key}/{slug}"
                kind = ACCEPT if i < 4 else REJECT
                rows.append((url, title_for(slug, track_name), 8 + i % 3,
                             kind[0], kind[1], kind[2], kind[3]))
        else:
            # 12 synthetic rows per track: first 6 accept, last 6 reject.
            for i, slug in enumerate(TOPICS[key]):
                url = f"https://data.example.org/{key}/{slug}"
                kind = ACCEPT if i < 6 else REJECT
                rows.append((url, title_for(slug, track_name), 7 + i % 4,
                             kind[0], kind[1], kind[2], kind[3]))

        for nn, (url, title, pages, r1, r1rec, r2, r2v) in enumerate(rows, 1):
            paper_id = f"PT{num}-{code}-{nn:02d}"
            datasets.append({
                "url": url,
                "track": track_name,
                "license": "CC-BY-4.0",
                "dua": "attribution recorded:1;terms reviewed:1",
                "notes": f"Synthetic fixture dataset for {track_name.lower()} studies.",
            })
            scores.append({
                "paper_id": paper_id,
                "title": title,
                "pages": pages,
                "r1_overall": f"{r1:.1f}",
                "r1_recommendation": r1rec,
                "r2_score": f"{r2:.1f}",
                "r2_verdict": r2v,
            })

    def write(path, fieldnames, rows):
        with open(HERE / path, "w", newline="") as f:
            w = csv.DictWriter(f, fieldnames, lineterminator="\n")
            w.writeheader()
            w.writerows(rows)

    dataset_cols = ["url", "track", "license", "dua", "notes"]
    score_cols = ["paper_id", "title", "pages", "r1_overall",
                  "r1_recommendation", "r2_score", "r2_verdict"]
    write("datasets_60.csv", dataset_cols, datasets)
    write("scores_60.csv", score_cols, scores)

    # Small fixtures: just the five worksheet papers.
    table_urls = {row[0] for row in SOCP_TABLE}
    write("datasets_social_progress.csv", dataset_cols,
          [d for d in datasets if d["url"] in table_urls])
    sp = [s for s in scores if s["paper_id"].startswith("PT1-SOCP-0")
          and int(s["paper_id"][-2:]) <= 5]
    write("scores_social_progress.csv", score_cols, sp)

    print(f"datasets: {len(datasets)}, scores: {len(scores)}, sp: {len(sp)}")


if __name__ == "__main__":
    main()
