#!/usr/bin/env python3
"""Regenerates the end-to-end fixture bundle in this directory.

Output is deterministic; rerunning leaves the files unchanged.
"""
import json
import random
from pathlib import Path

HERE = Path(__file__).resolve().parent
rng = random.Random(20191231)

# "liver" is stoplisted on purpose; the rest are not.
ANAT = ["pituitary gland", "liver", "renal cortex", "myocardium", "bronchus", "spleen", "pancreas",
        "thyroid gland", "adrenal gland", "stomach", "sigmoid colon", "urinary bladder", "prostate", "uterus",
        "ovary", "cerebral cortex", "spinal cord", "epidermis", "femur", "retina"]
DISO = ["prolactinoma", "hepatitis", "nephritis", "cardiomyopathy", "pneumonia", "splenomegaly",
        "pancreatitis", "goiter", "pheochromocytoma", "gastritis", "colitis", "cystitis", "prostatitis",
        "endometriosis", "ovarian cyst", "encephalitis", "myelopathy", "dermatitis", "myelofibrosis",
        "retinopathy", "cirrhosis", "glomerulonephritis", "myocarditis", "pleural effusion", "hypersplenism",
        "pancreatic cyst", "thyroiditis", "adrenal adenoma", "gastric ulcer", "colonic polyp"]
NEOPLASTIC = {"prolactinoma", "pheochromocytoma", "adrenal adenoma", "colonic polyp"}
DRUG = ["cabergoline", "bromocriptine", "isoniazid", "methotrexate", "amiodarone", "cyclophosphamide",
        "valproate", "lithium carbonate", "nitrofurantoin", "azathioprine", "tamoxifen", "ethambutol",
        "hydroxychloroquine", "doxorubicin", "ribavirin"]
PROC = ["hypophysectomy", "hepatectomy", "nephrectomy", "heart transplantation", "lobectomy",
        "splenectomy", "pancreatectomy", "thyroidectomy", "adrenalectomy", "gastrectomy"]

concepts = []  # (cui, name, tui)
n = 1000
def add(names, tui):
    global n
    out = []
    for name in names:
        n += 7
        cui = "C%07d" % n
        concepts.append((cui, name, tui))
        out.append(cui)
    return out

anat = add(ANAT, "T023")
diso = [c for c in add(DISO, "T047")]
for cui, name, tui in list(concepts):
    if name in NEOPLASTIC:
        concepts[concepts.index((cui, name, tui))] = (cui, name, "T191")
drug = add(DRUG, "T121")
proc = add(PROC, "T061")
# not whitelisted: an organism
organism = add(["escherichia coli"], "T007")[0]
name_of = {c: nm for c, nm, _ in concepts}
tui_of = {c: t for c, _, t in concepts}

triples = set()
for i, d in enumerate(diso):
    triples.add((anat[i % len(anat)], "finding_site_of", d))
    if i % 3 == 0:
        triples.add((anat[(i * 7 + 3) % len(anat)], "finding_site_of", d))
for i, p in enumerate(proc):
    triples.add((anat[i], "procedure_site_of", p))
for i, d in enumerate(drug):
    triples.add((d, "causative_agent_of", diso[(i * 4 + 1) % len(diso)]))
    triples.add((d, "causative_agent_of", diso[(i * 5 + 2) % len(diso)]))
for i in range(0, len(diso) - 1, 2):
    triples.add((diso[i], "cause_of", diso[(i + 5) % len(diso)]))
triples = sorted(triples)

def mrconso_row(cui, name, sab="SNOMEDCT_US", suppress="N", lat="ENG"):
    return "|".join([cui, lat, "P", "L0000001", "PF", "S0000001", "Y", "A0000001", "", "", "", sab, "PT",
                     "0", name, "0", suppress, "256"]) + "|"

def mrrel_row(cui1, rela, cui2, rel="RO", sab="SNOMEDCT_US", suppress="N"):
    return "|".join([cui1, "A1", "SCUI", rel, cui2, "A2", "SCUI", rela, "R1", "", sab, sab, "", "Y",
                     suppress, ""]) + "|"

INVERSE = {"finding_site_of": "has_finding_site", "procedure_site_of": "has_procedure_site",
           "causative_agent_of": "has_causative_agent", "cause_of": "due_to"}

conso = [mrconso_row(c, nm) for c, nm, _ in concepts]
conso.append(mrconso_row(anat[1], "hepatic structure"))
conso.append(mrconso_row(diso[0], "PRL-secreting adenoma", sab="MSH"))
conso.append(mrconso_row(diso[1], "obsolete hepatitis term", suppress="O"))
conso.append("C12|ENG|P|bad row|")

sty_names = {"T023": "Body Part, Organ, or Organ Component", "T047": "Disease or Syndrome",
             "T191": "Neoplastic Process", "T121": "Pharmacologic Substance",
             "T061": "Therapeutic or Preventive Procedure", "T007": "Bacterium"}
sty = ["|".join([c, t, "A1.2", sty_names[t], "AT0000001", "256"]) + "|" for c, _, t in concepts]
sty.append("|".join([drug[0], "T109", "A1.4", "Organic Chemical", "AT0000002", "256"]) + "|")

rel = []
for k, (h, r, t) in enumerate(triples):
    # MRREL reads "CUI2 RELA CUI1".
    rel.append(mrrel_row(t, r, h))
    if k % 4 == 0:
        rel.append(mrrel_row(h, INVERSE[r], t))
rel.append(mrrel_row(diso[2], "associated_with", diso[3]))
rel.append(mrrel_row(anat[2], "finding_site_of", organism))
rel.append(mrrel_row(diso[4], "isa", diso[5], rel="CHD"))
rel.append(mrrel_row(diso[6], "finding_site_of", anat[6], sab="MSH"))
rel.append(mrrel_row(diso[7], "", anat[7]))

(HERE / "MRCONSO.RRF").write_text("\n".join(conso) + "\n")
(HERE / "MRSTY.RRF").write_text("\n".join(sty) + "\n")
(HERE / "MRREL.RRF").write_text("\n".join(rel) + "\n")

TEMPLATES2 = [
    "Biopsy of the {0} confirmed {1} in this cohort .",
    "{1} involving the {0} was reported in two patients .",
    "We describe {1} of the {0} after long follow-up .",
    "Imaging of the {0} showed changes typical of {1} .",
]
TEMPLATES3 = [
    "Patients with {0} and {1} were screened for {2} .",
    "The {0} , the {1} and the {2} were examined at baseline .",
    "A case of {0} with {1} , later complicated by {2} , is presented .",
    "Neither {0} nor {1} predicted {2} in the multivariate model .",
]

def sentence(template, cuis):
    text, mentions, pos = "", [], 0
    parts = template.split("{")
    text = parts[0]
    for part in parts[1:]:
        idx, rest = int(part[0]), part[2:]
        name = name_of[cuis[idx]]
        start = len(text)
        text += name
        mentions.append({"cui": cuis[idx], "start": start, "end": start + len(name)})
        text += rest
    text = text[0].upper() + text[1:] if text[0].islower() and mentions[0]["start"] > 0 else text
    mentions.sort(key=lambda m: m["start"])
    return {"text": text, "mentions": mentions}

records = []
for k, (h, r, t) in enumerate(triples):
    for j in range(4):
        tpl = TEMPLATES2[(k + j) % len(TEMPLATES2)]
        records.append(sentence(tpl, [h, t]))
pool = [c for c in name_of if c != organism]
for k in range(2600):
    a, b, c = rng.sample(pool, 3)
    records.append(sentence(TEMPLATES3[k % len(TEMPLATES3)], [a, b, c]))
records.append(records[0])  # exact duplicate, removed by dedup
records.append({"text": "Broken offsets for liver .", "mentions": [{"cui": anat[1], "start": 19, "end": 40}]})
rng.shuffle(records)
with open(HERE / "sentences.jsonl", "w") as f:
    for i, rec in enumerate(records):
        rec["source_id"] = "PMID:%d" % (30000000 + i)
        f.write(json.dumps(rec) + "\n")

config = {"mrconso": "MRCONSO.RRF", "mrsty": "MRSTY.RRF", "mrrel": "MRREL.RRF",
          "sentences": "sentences.jsonl", "seed": 13, "ratios": [0.7, 0.1, 0.2], "mode": "transductive",
          "na_target": 0.9, "prune_threshold": 10000}
(HERE / "config.json").write_text(json.dumps(config, indent=2) + "\n")
print(len(concepts), "concepts,", len(triples), "triples,", len(records), "sentences")
