#!/usr/bin/env python3
"""Regenerate the bundled demo corpus (src/factgauge/data/toy_corpus.jsonl).

Texts are literal; annotations come from the heuristic tagger plus the
bundled gazetteer, then get frozen into the file. Run from the repo root:

    python3 scripts/make_toy_corpus.py
"""

from __future__ import annotations

import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from factgauge.corpus import Corpus, Document, SummaryRecord, save_corpus
from factgauge.taggers import _data_path, annotate, load_lexicons

# (id, domain, source_text, reference_summary)
RECORDS = [
    (
        "doc-01",
        "short-news",
        "Maria Keller announced a plan to widen the cycling bridge in Oslo. "
        "The bridge links the old port with the Northbank Council offices. "
        "Daniel Fischer criticized the cost and warned that the budget was already tight. "
        "Keller said the city would cover the gap with a small toll.",
        "Maria Keller announced a plan to widen the cycling bridge in Oslo, "
        "and she expects a small toll to cover the major cost.",
    ),
    (
        "doc-02",
        "short-news",
        "Northbank Council approved funding for a flood barrier along the river. "
        "Anna Novak, who chairs the planning board, called the vote a turning point. "
        "The barrier protects the low quarter near the harbor. "
        "Peter Lang opposed the schedule and asked for an independent review.",
        "Northbank Council approved a flood barrier for the low quarter, "
        "and Anna Novak said she was not happy with the slow schedule.",
    ),
    (
        "doc-03",
        "short-news",
        "Citywide Transit launched a night bus network covering twelve routes. "
        "Sofia Marino said the service links Porto with the airport and the university. "
        "Drivers trained for a week before the launch. "
        "Henrik Dahl called the rollout fast but warned about empty seats on early runs.",
        "Citywide Transit launched a fast night bus network in Porto, "
        "and Sofia Marino said it links the airport with the university.",
    ),
    (
        "doc-04",
        "short-news",
        "GreenGrid Energy opened a battery plant outside Tartu. "
        "Ingrid Sorensen toured the site with Estonian officials and praised the clean design. "
        "The plant stores wind power for the northern grid. "
        "Tomas Berg said demand was high and prices would stay low for households.",
        "GreenGrid Energy opened a battery plant near Tartu, "
        "and Tomas Berg said he expects demand to stay high.",
    ),
    (
        "doc-05",
        "short-news",
        "Silver Oak School won a national coding award for its robotics club. "
        "Laura Chen coaches the club and credits weekly practice. "
        "The team beat forty schools in the final round in Leeds. "
        "Oliver Grant, the head teacher, called the prize a proud moment for the whole town.",
        "Laura Chen coaches the Silver Oak School robotics club, "
        "and she says the team was successful at the final round in Leeds.",
    ),
    (
        "doc-06",
        "short-news",
        "Delta Airways dropped its plan for a second runway slot auction in Malmo. "
        "Julia Brandt said the airline would focus on quieter aircraft instead. "
        "Residents near the field backed the change. "
        "Victor Ortiz, who leads the noise committee, called the decision a rare win "
        "for the neighborhood.",
        "Delta Airways dropped the runway auction plan in Malmo, "
        "and Victor Ortiz said it was a popular decision with residents.",
    ),
    (
        "doc-07",
        "short-news",
        "The Crown Museum opened a free late gallery program for students. "
        "Helena Fuchs curated the first show with loans from Turin and Graz. "
        "Attendance doubled within a month of the launch. "
        "Adam Kowalski said the museum would extend the program if funding remained stable.",
        "The Crown Museum opened a free late gallery program, "
        "and Helena Fuchs said she expects loans from Turin for the next show.",
    ),
    (
        "doc-08",
        "short-news",
        "Baltic Rail restored the night train between Bergen and Ghent after a public campaign. "
        "Clara Voss led the petition and gathered ninety thousand signatures. "
        "The first service sold out within hours. "
        "Felix Braun said ticket prices would stay cheap through the spring season.",
        "Baltic Rail restored the Bergen night train after a public campaign, "
        "and Clara Voss said she gathered ninety thousand signatures.",
    ),
    (
        "doc-09",
        "long-news",
        "Justin Trudeau visited Dublin for two days of talks with Leo Varadkar about trade "
        "and migration. The leaders toured the port and met Irish business groups over a "
        "working lunch. Trudeau praised the Canadian partnership with local exporters and "
        "pointed to rising demand for clean fuel. Varadkar pressed for faster visa "
        "processing for students. Both offices described the meeting as warm, although "
        "officials admitted that a final deal remained unlikely this year. A joint "
        "statement promised a follow-up summit in Ottawa.",
        "Justin Trudeau visited Dublin and praised the Canadian partnership with Irish "
        "exporters, but he admitted that a final deal remained unlikely.",
    ),
    (
        "doc-10",
        "long-news",
        "The finance committee in Brno spent a week on the city budget and the mood stayed "
        "tense. Marco Ricci defended a freeze on hiring, arguing that revenue growth was "
        "weak and that reserves were thin. Nadia Hassan wanted more money for schools and "
        "called the freeze a false economy. After four late sessions the committee "
        "approved a compromise that protects classroom spending. Ricci said the deal was "
        "fair. Hassan said she would watch the spring figures before judging it.",
        "The Brno committee approved a compromise budget after Nadia Hassan said the "
        "hiring freeze was a false economy, and she plans to watch the spring figures.",
    ),
    (
        "doc-11",
        "long-news",
        "Union Labs published a five-year study on air quality in Lille and the results "
        "drew wide attention. The study tracked eight thousand residents and linked heavy "
        "traffic with asthma in children. Helena Fuchs presented the findings to Marco "
        "Ricci at the health ministry. French officials promised new limits for delivery vans in "
        "school zones. Industry groups called the plan expensive and warned about job "
        "losses. Helena Fuchs answered that the health costs were higher.",
        "Union Labs linked heavy traffic with asthma among children in Lille, and Helena "
        "Fuchs said the plan was cheap next to the health costs it prevents.",
    ),
    (
        "doc-12",
        "long-news",
        "The harbor authority in Bergen reported a record year for cargo despite a weak "
        "start. Container volume rose after two new cranes entered service in the east "
        "terminal. Ingrid Sorensen credited the turnaround to a deal with Baltic Rail "
        "that moved freight onto night trains. Dock workers gained a safety bonus under "
        "the same deal. Felix Braun cautioned that global shipping remained slow and "
        "that the port should stay careful with new debt.",
        "The Bergen harbor authority reported a record cargo year, and Ingrid Sorensen "
        "credited a deal with Baltic Rail although she called global shipping slow.",
    ),
    (
        "doc-13",
        "long-news",
        "Redwood Clinic expanded its night shift after a rise in winter admissions. "
        "Emma Walsh hired twelve nurses and opened a second triage room. Waiting times "
        "dropped by a third within six weeks. Lucas Meyer said staff morale stayed "
        "strong because the rota finally matched demand. The clinic also added a free "
        "shuttle from the rail station in Graz. Local councillors praised the change "
        "and promised stable funding for two years.",
        "Redwood Clinic expanded its night shift, and Emma Walsh said waiting times "
        "dropped while staff morale stayed strong.",
    ),
    (
        "doc-14",
        "long-news",
        "A storm closed the coast road between Porto and the fishing villages for three "
        "days. Crews cleared rockfall and rebuilt two low walls above the bay. Sofia "
        "Marino praised the fast response and visited the crews with hot meals. The "
        "regional fund covers the repair, although the final bill remains open. "
        "Fishermen lost a weekend of sales and asked for a small grant. Officials "
        "promised an answer within a month.",
        "A storm closed the coast road near Porto, and Sofia Marino praised the fast "
        "repair crews after she visited them with hot meals.",
    ),
    (
        "doc-15",
        "dialogue",
        "Anna Novak: Did you see the new timetable from Citywide Transit?\n"
        "Peter Lang: I did, and the early bus now skips my street.\n"
        "Anna Novak: They moved it to the harbor loop.\n"
        "Peter Lang: That route was always full by eight.\n"
        "Anna Novak: Write to the council, or the change stays.",
        "Peter Lang told Anna Novak that the early bus now skips his street because "
        "Citywide Transit moved it to the harbor loop, and he was not happy.",
    ),
    (
        "doc-16",
        "dialogue",
        "Laura Chen: The robotics final in Leeds is moved to the main hall.\n"
        "Oliver Grant: Good, the old room was too small for the crowd.\n"
        "Laura Chen: Parents can watch from the balcony this time.\n"
        "Oliver Grant: I will bring the spare kits in my car.\n"
        "Laura Chen: Thanks, the team will be happy.",
        "Oliver Grant said the old room in Leeds was too small, and he will bring the "
        "spare kits in his car for the robotics final.",
    ),
    (
        "doc-17",
        "dialogue",
        "Emma Walsh: The night shift rota for Redwood Clinic is ready.\n"
        "Lucas Meyer: Does it cover the winter weekends?\n"
        "Emma Walsh: It does, and it keeps two nurses on triage.\n"
        "Lucas Meyer: Then I can tell the union the plan is safe.\n"
        "Emma Walsh: Tell them we listened to the survey.",
        "Emma Walsh told Lucas Meyer that the Redwood Clinic rota is ready, covers the "
        "winter weekends, and keeps two nurses on triage, so he calls the plan safe.",
    ),
    (
        "doc-18",
        "dialogue",
        "Victor Ortiz: The noise report from Delta Airways landed this morning.\n"
        "Julia Brandt: Are the night figures high again?\n"
        "Victor Ortiz: They are lower near the field but loud over the river.\n"
        "Julia Brandt: Then we push for the quiet descent trial.\n"
        "Victor Ortiz: I will draft the letter tonight.",
        "Victor Ortiz told Julia Brandt that the Delta Airways night figures are loud "
        "over the river, so they push for the quiet descent trial.",
    ),
    (
        "doc-19",
        "other",
        "The market survey tracked grocery prices across two hundred stores for a year. "
        "Prices for staples stayed flat while fresh produce moved with the seasons. "
        "The cheap store brands gained share in every region. Analysts expect the "
        "pattern to hold unless fuel costs rise. The full report is free to download.",
        "The survey found that cheap store brands gained share, and the outlook for "
        "prices is positive while fuel costs stay low.",
    ),
    (
        "doc-20",
        "other",
        "A reader poll asked which projects the town should fund first. The harbor walk "
        "led the vote, ahead of the library roof and the skate park. Turnout doubled "
        "compared with the last poll. Organizers thanked everyone who voted and "
        "promised to publish the full table. Council members meet next week to review "
        "the result.",
        "Residents say they support the harbor walk ahead of the library roof, and "
        "organizers promised to publish the result.",
    ),
]


def main() -> None:
    lexicons = load_lexicons(gazetteer=_data_path("gazetteer.tsv"))
    corpus = Corpus()
    for doc_id, domain, source, summary in RECORDS:
        doc_ann = annotate(source, lexicons)
        sum_ann = annotate(summary, lexicons)
        corpus.documents[doc_id] = Document(
            id=doc_id, text=source, domain=domain, annotations=doc_ann
        )
        corpus.references[doc_id] = SummaryRecord(
            doc_id=doc_id, text=summary, kind="reference", annotations=sum_ann
        )

    out = ROOT / "src" / "factgauge" / "data" / "toy_corpus.jsonl"
    save_corpus(corpus, out)
    print(f"wrote {out} ({len(corpus)} documents)")

    for doc_id in corpus.ids():
        doc = corpus.documents[doc_id]
        ref = corpus.references[doc_id]
        ann = ref.annotations
        ents = [(ref.text[s:e], lab) for s, e, lab in ann.entity_spans]
        prons = [ref.text[s:e] for s, e in ann.pronoun_spans]
        verbs = [(ref.text[s:e], t) for s, e, t in ann.verb_tokens]
        adjs = [ref.text[s:e] for s, e in ann.adjective_tokens]
        doc_ents = [(doc.text[s:e], lab) for s, e, lab in doc.annotations.entity_spans]
        print(f"\n{doc_id} [{doc.domain}]")
        print(f"  doc entities: {doc_ents}")
        print(f"  ref entities: {ents}")
        print(f"  ref pronouns: {prons}")
        print(f"  ref verbs:    {verbs}")
        print(f"  ref adjs:     {adjs}")


if __name__ == "__main__":
    main()
