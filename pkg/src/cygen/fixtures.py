"""Built-in fixture graphs for tests, demos, and offline pipeline runs.

`medkg` is a small medical knowledge graph: diseases, departments, drugs,
foods, checks, symptoms, producers, and sports, wired with the usual
belongs_to / has_symptom / no_eat ... edge types. Construction is pure and
deterministic so schema extraction from it is byte-stable.
"""

from __future__ import annotations

import datetime as dt

from .errors import GraphConnectionError
from .graphdb.memgraph import MemoryGraph

_DEPARTMENTS = [
    "Cardiology", "Dermatology", "Endocrinology", "Gastroenterology",
    "Internal Medicine", "Neurology", "Oncology", "Ophthalmology",
    "Orthopedics", "Pediatrics", "Psychiatry", "Respiratory Medicine",
    "Surgery",
]

_DEPARTMENT_PARENTS = [
    ("Cardiology", "Internal Medicine"),
    ("Endocrinology", "Internal Medicine"),
    ("Gastroenterology", "Internal Medicine"),
    ("Respiratory Medicine", "Internal Medicine"),
]

# (name, department, severity_level)
_DISEASES = [
    ("Anemia", "Internal Medicine", 2),
    ("Anxiety disorder", "Psychiatry", 2),
    ("Appendicitis", "Surgery", 3),
    ("Arthritis", "Orthopedics", 2),
    ("Asthma", "Respiratory Medicine", 3),
    ("Brain tumor", "Oncology", 5),
    ("Breast cancer", "Oncology", 5),
    ("Bronchitis", "Respiratory Medicine", 2),
    ("Cancer", "Oncology", 5),
    ("Coeliac disease", "Gastroenterology", 3),
    ("Colon cancer", "Oncology", 5),
    ("Depression", "Psychiatry", 3),
    ("Dermatitis", "Dermatology", 1),
    ("Diabetes", "Endocrinology", 3),
    ("Eczema", "Dermatology", 1),
    ("Epilepsy", "Neurology", 4),
    ("Gastritis", "Gastroenterology", 2),
    ("Glaucoma", "Ophthalmology", 3),
    ("Hypertension", "Cardiology", 3),
    ("Influenza", "Internal Medicine", 1),
    ("Insomnia", "Psychiatry", 1),
    ("Measles", "Pediatrics", 2),
    ("Migraine", "Neurology", 2),
    ("Pancreatic cancer", "Oncology", 5),
    ("Panic disorder", "Psychiatry", 2),
    ("Pneumonia", "Respiratory Medicine", 3),
]

_ACCOMPANY = [
    ("Depression", "Insomnia"),
    ("Depression", "Anxiety disorder"),
    ("Cancer", "Anemia"),
    ("Hypertension", "Diabetes"),
    ("Influenza", "Pneumonia"),
    ("Gastritis", "Anemia"),
    ("Brain tumor", "Epilepsy"),
    ("Asthma", "Bronchitis"),
    ("Panic disorder", "Anxiety disorder"),
]

# (name, price, stock, otc, approval_date)
_DRUGS = [
    ("Amlodipine", 12.5, 420, False, "2018-03-12"),
    ("Amoxicillin", 8.9, 510, False, "2015-06-01"),
    ("Aspirin", 3.2, 900, True, "2010-01-20"),
    ("Atorvastatin", 15.75, 260, False, "2019-09-30"),
    ("Cetirizine", 6.4, 700, True, "2016-04-18"),
    ("Diazepam", 9.8, 150, False, "2012-11-05"),
    ("Fluoxetine", 11.3, 310, False, "2017-02-14"),
    ("Ibuprofen", 4.5, 840, True, "2011-08-23"),
    ("Insulin glargine", 33.0, 190, False, "2020-05-11"),
    ("Metformin", 7.25, 620, False, "2014-10-02"),
    ("Morphine", 21.0, 80, False, "2013-07-19"),
    ("Omeprazole", 10.6, 450, True, "2018-12-03"),
    ("Paracetamol", 2.8, 1000, True, "2009-05-15"),
    ("Prednisone", 13.4, 230, False, "2016-09-27"),
    ("Salbutamol", 14.2, 340, False, "2021-01-08"),
    ("Sertraline", 12.9, 280, False, "2019-03-22"),
    ("Sumatriptan", 18.5, 120, False, "2022-06-30"),
    ("Warfarin", 9.1, 210, False, "2015-02-09"),
]

_FOODS = [
    "Almonds", "Apple", "Banana", "Beef", "Broccoli", "Carrot",
    "Chicken soup", "Chili peppers", "Coffee", "Fried chicken",
    "Ginger tea", "Green tea", "Oatmeal", "Rice porridge", "Salmon",
    "Spinach", "Tomato soup", "Whole wheat bread", "Wine", "Yogurt",
]

# (name, cost)
_CHECKS = [
    ("Biopsy", 420.0), ("Blood test", 35.5), ("Bronchography", 310.0),
    ("CT scan", 450.0), ("Colonoscopy", 380.0), ("ECG", 90.0),
    ("EEG", 160.0), ("Endoscopy", 340.0), ("MRI scan", 520.0),
    ("Ultrasound", 120.0), ("Urinalysis", 28.0), ("X-ray", 75.0),
]

_SYMPTOMS = [
    "Abdominal pain", "Blurred vision", "Chest pain", "Chills", "Cough",
    "Diarrhea", "Dizziness", "Fatigue", "Fever", "Headache",
    "Insomnia symptom", "Itching", "Joint pain", "Loss of appetite",
    "Nausea", "Rash", "Shortness of breath", "Sneezing", "Weight loss",
    "Wheezing",
]

_PRODUCERS = [
    "Apex Biologics", "Blue Ridge Pharma", "Crescent Labs",
    "Eastgate Pharmaceuticals", "Harbor Remedies", "Lumen Therapeutics",
    "Northfield Pharma", "Quartz Medica", "Silverleaf Biosciences",
    "Westbrook Laboratories",
]

_SPORTS = ["Biking", "Running", "Swimming", "Walking"]

_CURE_WAYS = [
    "medication", "surgery", "physiotherapy", "radiotherapy",
    "chemotherapy", "psychotherapy", "dietary adjustment", "rest",
]

_EASY_GET = ["infants", "the elderly", "office workers", "smokers", "anyone"]
_LASTTIME = ["1-2 weeks", "2-4 weeks", "1-3 months", "3-6 months", "long-term"]
_PROB = ["60%", "70%", "80%", "90%", "95%"]


def build_medkg() -> MemoryGraph:
    graph = MemoryGraph()

    departments = {
        name: graph.add_node("Department", name=name) for name in _DEPARTMENTS
    }
    for child, parent in _DEPARTMENT_PARENTS:
        graph.add_rel(departments[child], "belongs_to", departments[parent],
                      name="belongs to")

    diseases = {}
    for i, (name, dept, severity) in enumerate(_DISEASES):
        cure_way = [_CURE_WAYS[i % len(_CURE_WAYS)], _CURE_WAYS[(i + 3) % len(_CURE_WAYS)]]
        diseases[name] = graph.add_node(
            "Disease",
            name=name,
            desc=f"{name} is a condition commonly treated by the {dept} department.",
            prevent=f"Maintain a healthy lifestyle to reduce the risk of {name.lower()}.",
            cause=f"The causes of {name.lower()} include genetic and environmental factors.",
            easy_get=_EASY_GET[i % len(_EASY_GET)],
            cure_lasttime=_LASTTIME[i % len(_LASTTIME)],
            cured_prob=_PROB[i % len(_PROB)],
            cure_way=cure_way,
            cure_department=[dept],
            severity_level=severity,
        )
        graph.add_rel(diseases[name], "belongs_to", departments[dept], name="belongs to")

    drugs = {}
    for name, price, stock, otc, approved in _DRUGS:
        drugs[name] = graph.add_node(
            "Drug", name=name, price=price, stock=stock, otc=otc,
            approval_date=dt.date.fromisoformat(approved),
        )

    foods = {name: graph.add_node("Food", name=name) for name in _FOODS}
    checks = {name: graph.add_node("Check", name=name, cost=cost) for name, cost in _CHECKS}
    symptoms = {name: graph.add_node("Symptom", name=name) for name in _SYMPTOMS}
    sports = {name: graph.add_node("Sport", name=name) for name in _SPORTS}

    producers = {}
    drug_names = [d[0] for d in _DRUGS]
    for i, name in enumerate(_PRODUCERS):
        producers[name] = graph.add_node("Producer", name=name)
        for k in range(2):
            drug = drug_names[(i * 2 + k) % len(drug_names)]
            graph.add_rel(producers[name], "drugs_of", drugs[drug], name="produces")

    for src, dst in _ACCOMPANY:
        graph.add_rel(diseases[src], "acompany_with", diseases[dst], name="accompanies")

    # rotation-indexed edges keep the builder pure while spreading coverage
    for i, (name, _dept, _sev) in enumerate(_DISEASES):
        disease = diseases[name]
        for k in range(2):
            graph.add_rel(disease, "has_symptom",
                          symptoms[_SYMPTOMS[(i * 2 + k) % len(_SYMPTOMS)]],
                          name="has symptom")
        graph.add_rel(disease, "need_check",
                      checks[_CHECKS[i % len(_CHECKS)][0]], name="needs check")
        graph.add_rel(disease, "need_check",
                      checks[_CHECKS[(i + 5) % len(_CHECKS)][0]], name="needs check")
        graph.add_rel(disease, "common_drug",
                      drugs[drug_names[i % len(drug_names)]], name="common drug")
        graph.add_rel(disease, "recommand_drug",
                      drugs[drug_names[(i + 7) % len(drug_names)]], name="recommended drug")
        graph.add_rel(disease, "recommand_eat",
                      foods[_FOODS[i % len(_FOODS)]], name="recommended food")
        graph.add_rel(disease, "recommand_eat",
                      foods[_FOODS[(i + 4) % len(_FOODS)]], name="recommended food")
        graph.add_rel(disease, "do_eat",
                      foods[_FOODS[(i + 9) % len(_FOODS)]], name="good to eat")
        graph.add_rel(disease, "no_eat",
                      foods[_FOODS[(i + 13) % len(_FOODS)]], name="avoid eating")
        graph.add_rel(disease, "no_eat",
                      foods[_FOODS[(i + 17) % len(_FOODS)]], name="avoid eating")

    for sport_name in _SPORTS:
        graph.add_rel(diseases["Coeliac disease"], "recommand_sport",
                      sports[sport_name], name="recommended sport")
    graph.add_rel(diseases["Hypertension"], "recommand_sport", sports["Walking"],
                  name="recommended sport")
    graph.add_rel(diseases["Depression"], "recommand_sport", sports["Running"],
                  name="recommended sport")

    return graph


_FIXTURES = {"medkg": build_medkg}


def build_fixture(name: str) -> MemoryGraph:
    builder = _FIXTURES.get(name)
    if builder is None:
        known = ", ".join(sorted(_FIXTURES))
        raise GraphConnectionError(f"unknown fixture graph {name!r} (known: {known})")
    return builder()
