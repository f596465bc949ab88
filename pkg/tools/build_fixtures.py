"""Build the committed test fixtures.

Run from the repository root after any intentional change to the fixture
workspaces or the compiler's rendering rules:

    python3 tools/build_fixtures.py

Writes, under tests/fixtures/:

* crescent_workspace.json  - the 40-document investigation workspace
  (23 relevant, four named clusters, participant-name highlights,
  coordinator annotations, a 22-link timeline)
* crescent_board.json      - board export mirroring the workspace's
  relevant slice, for the ingest round-trip tests
* litreview_workspace.json - the small literature-survey workspace
* crescent_plan.json       - a three-condition smoke plan
* goldens/E1.json .. E11.json - frozen prompt bundles for the crescent
  workspace under every condition preset

The goldens are generated by the current compiler on purpose: they freeze
today's bytes so any future rendering drift fails loudly. Regenerating them
is an explicit act recorded in git, not something tests ever do.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

from spacesteer import (
    Annotation,
    Cluster,
    Connection,
    Document,
    Highlight,
    PRESETS,
    Ref,
    Workspace,
    assemble_prompt,
    export_board,
    load_default_template,
    serialize,
    validate,
)

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

# The second document is rendered in the canonical worked example of the
# compiled prompt; its punctuation quirks are the dataset's own and must
# survive byte-for-byte.
SI_2_BODY = (
    "Report Date 20 April. 2003:----- Intercept of phone calls made from "
    "718-352-8479 at 2462 Myrtle Ave.Apt. 307, Queens. NYC revealed several "
    "calls to a phone 732-455-6392 in North Bergen, New Jersey.listed in the "
    "name of Hani al-Hallak, who manages a carpet store. In the latest call, "
    "the caller from 2462 Myrtle Ave. Apt. 307, Queens, NYC announced that "
    "he would pick up the carpet he ordered on April 25,2003."
)

RELEVANT_DOCS: list[tuple[str, str]] = [
    ("SI_2", SI_2_BODY),
    ("FBI_1", (
        "Report Date 15 April, 2003:----- Review of bank records shows that "
        "Abdul Ramazi, owner of the Select Gourmet Foods shop in Springfield "
        "Mall, moved $32,000 in nine cash deposits into a First Union "
        "National Bank account during March 2003. The account lists a second "
        "signatory in Queens, NYC, and a branch employee recalls Ramazi "
        "asking about wire limits to New Jersey."
    )),
    ("FBI_2", (
        "Report Date 16 April, 2003:----- A background check on New York "
        "Stock Exchange custodial staff flags three employees hired in the "
        "same February 2003 week: Steven Clark, Shiela Watson, and Mark "
        "Davis, whose stated references could not be reached. Davis lists a "
        "previous address in Queens, NYC."
    )),
    ("FBI_3", (
        "Report Date 17 April, 2003:----- A Boston field interview with the "
        "harbormaster notes that the fishing vessel Capt. Mike's Dream was "
        "sold in March 2003 to a cash buyer registered as Faysal Goba. The "
        "vessel has not left its mooring since the sale, yet weekly fuel "
        "purchases continue."
    )),
    ("FBI_4", (
        "Report Date 18 April, 2003:----- A Charlottesville, VA firearms "
        "dealer reports that a man identifying himself as Tawfiq al Adel "
        "asked to buy two handguns without the waiting period, claiming "
        "imminent travel. The callback number he left matches the Little "
        "High Street residence."
    )),
    ("SI_5", (
        "Report Date 21 April, 2003:----- Intercept of a call from "
        "732-455-6392 in North Bergen, New Jersey to 718-352-8479 in Queens, "
        "NYC. The caller said the order is ready ahead of April 25. Toll "
        "records tie the Queens phone to an apartment leased by Bagwant "
        "Dhaliwal, also known as Sahim Albakri."
    )),
    ("CIA_6", (
        "Report Date 14 April, 2003:----- A liaison service reports that "
        "Mukhtar Galab, admitted to the US on a student visa in 2001, "
        "received wire transfers from a Cyprus account flagged in an earlier "
        "proliferation inquiry. Galab resides in Boston and works part-time "
        "at a marine supply store."
    )),
    ("TR_7", (
        "Report Date 13 April, 2003:----- Treasury traces a $9,500 wire from "
        "the First Union National Bank account in Queens, NYC to a "
        "Charlottesville, VA account opened in March 2003. The receiving "
        "account immediately paid three months of rent on Little High "
        "Street."
    )),
    ("CIA_8", (
        "Report Date 19 April, 2003:----- Collation of liaison reporting "
        "places Abdul Ramazi in contact with persons in Queens, NYC, in "
        "Boston, and in Charlottesville, VA through March and April 2003. "
        "The pattern is consistent with a single planner tasking three "
        "separate teams."
    )),
    ("NSA_9", (
        "Report Date 22 April, 2003:----- Intercept of a satellite phone "
        "call placed from Charlottesville, VA to a number in Yemen. The "
        "caller, voice-matched as Saeed Khallad, said the tickets are bought "
        "and the three will ride south together on the 29th."
    )),
    ("PC_10", (
        "Report Date 12 April, 2003:----- Prince William County police "
        "stopped a rental van parked near a rail siding at 02:00. The "
        "driver, licensed as Hans Pakes, said he was scouting fishing spots; "
        "a consent search found timetables for the southbound Crescent route "
        "and a scanner tuned to railroad frequencies."
    )),
    ("NSA_11", (
        "Report Date 26 April, 2003:----- Intercept of a call from the "
        "Select Gourmet Foods shop phone to 2462 Myrtle Ave. Apt. 307, "
        "Queens, NYC. The caller, voice-matched to Muhammed bin Harazi, said "
        "all three gifts must open on the 29th or the 30th and that nothing "
        "moves before his word."
    )),
    ("FBI_12", (
        "Report Date 23 April, 2003:----- Inspection of the North Bergen "
        "carpet store operated by Hani al-Hallak found a storage annex "
        "leased in February 2003 and prepaid in cash. A clerk states the "
        "annex holds carpet rolls awaiting an April 25 pickup by a customer "
        "from Queens."
    )),
    ("CG_13", (
        "Report Date 24 April, 2003:----- Coast Guard boarding of the "
        "fishing vessel Capt. Mike's Dream in Boston Harbor found recently "
        "installed shelving below deck and a locked forward compartment the "
        "crew could not open. The master produced a permit naming an April "
        "29 charter, and the boarding team logged elevated radiation "
        "readings near the bow."
    )),
    ("SI_14", (
        "Report Date 21 April, 2003:----- Intercept of a call from a Boston "
        "pay phone to a Charlottesville, VA number. The caller, who gave his "
        "name as Faysal Goba, asked whether the friends from Virginia would "
        "arrive before the 29th and said the boat must be loaded at night."
    )),
    ("FBI_15", (
        "Report Date 19 April, 2003:----- Subpoenaed records for the First "
        "Union National Bank account show outbound transfers to Queens, "
        "Boston, and Charlottesville matching the rent and purchase dates in "
        "field reporting. The listed signatory is Abdul Ramazi."
    )),
    ("SI_16", (
        "Report Date 22 April, 2003:----- Intercept of a call placed from a "
        "pay phone near the New York Stock Exchange to 2462 Myrtle Ave. Apt. "
        "307, Queens, NYC. The caller said the uniforms fit and asked "
        "whether the delivery was still set for the 25th; the receiver "
        "answered that the carpet arrives as planned."
    )),
    ("TR_17", (
        "Report Date 15 April, 2003:----- Treasury flags a pattern of ATM "
        "withdrawals in Boston against a Virginia account held jointly by "
        "three men sharing the Little High Street address in "
        "Charlottesville, VA. The withdrawals cluster near the harbor and a "
        "marine supply store."
    )),
    ("AMTRAK_18", (
        "Report Date 25 April, 2003:----- Booking records show three one-way "
        "tickets from Charlottesville, VA to Atlanta, GA on train 19 "
        "departing April 29, purchased in cash under three names sharing the "
        "Little High Street address."
    )),
    ("INS_19", (
        "Report Date 10 April, 2003:----- Immigration records show Yasein "
        "Mosed, admitted in 1999, failed to appear at a 2002 hearing. His "
        "current address is unlisted, but a 2003 utility record places a Y. "
        "Mosed at the Little High Street address in Charlottesville, VA."
    )),
    ("FBI_20", (
        "Report Date 26 April, 2003:----- Surveillance of 2462 Myrtle Ave. "
        "Apt. 307, Queens, NYC observed a van delivering three carpet rolls "
        "at 06:40. Two rolls were carried inside; the third was reloaded and "
        "driven toward lower Manhattan, and the van returned empty by 09:15."
    )),
    ("TR_21", (
        "Report Date 24 April, 2003:----- Treasury notes the Charlottesville "
        "account was emptied by counter withdrawal on April 24. The teller "
        "recalls three men, one carrying a hard-sided case, who declined an "
        "escort to their car."
    )),
    ("SI_22", (
        "Report Date 27 April, 2003:----- Intercept of two short calls from "
        "2462 Myrtle Ave. Apt. 307, Queens, NYC to pay phones in Boston and "
        "Charlottesville within one hour. Both calls consisted of the same "
        "phrase: the market opens on Tuesday."
    )),
]

IRRELEVANT_DOCS: list[tuple[str, str]] = [
    ("FBI_24", (
        "Report Date 02 April, 2003:----- Witnesses to the Dayton, Ohio "
        "armored car robbery picked two local career criminals out of a "
        "photo array. Both men are in custody and the recovered bills match "
        "the shipment manifest."
    )),
    ("CIA_25", (
        "Report Date 03 April, 2003:----- A liaison service reports a "
        "counterfeit currency press operating out of a print shop in Tampa, "
        "Florida. The plates imitate an obsolete 1996 series and the Secret "
        "Service has taken the referral."
    )),
    ("NSA_26", (
        "Report Date 05 April, 2003:----- Intercept of radio traffic "
        "between two commercial trawlers off Gloucester concerns a dispute "
        "over lobster pot lines. No criminal predicate identified."
    )),
    ("TR_27", (
        "Report Date 04 April, 2003:----- Treasury review of a Laredo, "
        "Texas used-car dealership shows cash deposits structured under the "
        "reporting threshold. The pattern matches tax evasion tied to "
        "cross-border vehicle sales."
    )),
    ("SI_28", (
        "Report Date 06 April, 2003:----- Intercept on a Newark line "
        "captured a lengthy domestic dispute over an unpaid furniture loan. "
        "No foreign nexus; retention not recommended."
    )),
    ("FBI_29", (
        "Report Date 07 April, 2003:----- A Chicago gallery reported the "
        "recovery of two oil paintings stolen in 1998. The fence attempted "
        "to consign them under a deceased collector's name."
    )),
    ("PC_30", (
        "Report Date 08 April, 2003:----- County units responded to an "
        "overturned tanker of cooking oil on Route 29. The spill closed one "
        "lane for six hours; the carrier was cited for an unsecured load."
    )),
    ("CG_31", (
        "Report Date 09 April, 2003:----- Coast Guard towed a disabled "
        "sailboat with two aboard into Hyannis after a distress call. Both "
        "sailors declined medical attention."
    )),
    ("INS_32", (
        "Report Date 05 April, 2003:----- A Seattle restaurant inspection "
        "found one kitchen worker with an expired visitor visa. The subject "
        "has no other record and was referred for a routine hearing."
    )),
    ("CIA_33", (
        "Report Date 11 April, 2003:----- A retired foreign diplomat is "
        "shopping a memoir that names station personnel from the 1980s. "
        "Legal review concluded the manuscript contains no current "
        "equities."
    )),
    ("NSA_34", (
        "Report Date 13 April, 2003:----- Intercept of calls between "
        "Atlantic City and Montreal concerns point spreads on European "
        "soccer fixtures. Referred to the gaming task force."
    )),
    ("TR_35", (
        "Report Date 14 April, 2003:----- A Reno casino self-reported a "
        "lapse in currency transaction filings during a March software "
        "migration. Amended filings are complete and no pattern of evasion "
        "appears."
    )),
    ("FBI_36", (
        "Report Date 16 April, 2003:----- The letters threatening a Denver "
        "radio host were traced to a former station employee, who "
        "confessed. The subject is in custody and the case is closed."
    )),
    ("SI_37", (
        "Report Date 18 April, 2003:----- Intercept logged repeated calls "
        "between Queens, NYC and Toronto arranging wedding catering for "
        "late May. Content is social; retention not recommended."
    )),
    ("PC_38", (
        "Report Date 20 April, 2003:----- Residents near the county "
        "airfield filed noise complaints about early morning banner-tow "
        "flights. The operator's permits are current."
    )),
    ("CG_39", (
        "Report Date 22 April, 2003:----- A bulk carrier in the Gulf port "
        "was cited for a minor fuel sheen during bunkering. The discharge "
        "was contained by boom within the hour."
    )),
    ("DEA_40", (
        "Report Date 25 April, 2003:----- Interdiction on I-95 near "
        "Savannah recovered 40 kilograms of marijuana in a concealed "
        "compartment. The courier is cooperating; the load traces to a "
        "Miami distributor."
    )),
]

CLUSTERS: list[tuple[str, str, list[str]]] = [
    ("nyse", "NYSE",
     ["SI_2", "FBI_1", "FBI_2", "SI_5", "FBI_12", "SI_16", "FBI_20"]),
    ("boston", "Boston Harbor",
     ["FBI_3", "CIA_6", "CG_13", "SI_14", "TR_17", "INS_19"]),
    ("amtrak", "Atlanta Amtrak",
     ["FBI_4", "TR_7", "NSA_9", "PC_10", "AMTRAK_18", "TR_21"]),
    ("coordination", "Coordination",
     ["CIA_8", "NSA_11", "FBI_15", "SI_22"]),
]

# (document, exact text to mark) in highlight-act order; the first cluster's
# tallies reproduce the worked words-and-weights example.
HIGHLIGHT_ACTS: list[tuple[str, str]] = [
    ("SI_2", "Hani al-Hallak"),
    ("FBI_12", "Hani al-Hallak"),
    ("FBI_2", "Mark Davis,"),
    ("SI_5", "Bagwant Dhaliwal"),
    ("FBI_3", "Faysal Goba"),
    ("SI_14", "Faysal Goba"),
    ("CIA_6", "Mukhtar Galab"),
    ("INS_19", "Yasein Mosed"),
    ("FBI_4", "Tawfiq al Adel"),
    ("NSA_9", "Saeed Khallad"),
    ("PC_10", "Hans Pakes"),
    ("CIA_8", "Abdul Ramazi"),
    ("FBI_15", "Abdul Ramazi"),
    ("NSA_11", "Muhammed bin Harazi"),
]

ANNOTATIONS: list[tuple[str, str]] = [
    ("FBI_1", "Evidence for that Ramazi is the main coordinator"),
    ("CIA_8", "Ramazi is tasking all three teams from Queens"),
    ("NSA_11", "The go signal comes from Ramazi: the 29th or the 30th"),
    ("FBI_15", "Ramazi's account funds every safe house"),
]

# Relevant documents chained in report-date order.
TIMELINE: list[str] = [
    "INS_19", "PC_10", "TR_7", "CIA_6", "FBI_1", "TR_17", "FBI_2", "FBI_3",
    "FBI_4", "CIA_8", "FBI_15", "SI_2", "SI_5", "SI_14", "NSA_9", "SI_16",
    "FBI_12", "CG_13", "TR_21", "AMTRAK_18", "FBI_20", "NSA_11", "SI_22",
]


def _highlight(docs: dict[str, str], doc_id: str, text: str) -> Highlight:
    start = docs[doc_id].index(text)
    return Highlight(doc_id=doc_id, start=start, end=start + len(text), text=text)


def crescent_workspace() -> Workspace:
    documents = tuple(
        Document(id=doc_id, body=body)
        for doc_id, body in RELEVANT_DOCS + IRRELEVANT_DOCS
    )
    bodies = {d.id: d.body for d in documents}
    relevant = frozenset(doc_id for doc_id, _ in RELEVANT_DOCS)
    highlights = tuple(
        _highlight(bodies, doc_id, text) for doc_id, text in HIGHLIGHT_ACTS)
    annotations = tuple(
        Annotation(target=target, text=text) for target, text in ANNOTATIONS)
    clusters = tuple(
        Cluster(id=cid, name=name, members=tuple(members))
        for cid, name, members in CLUSTERS)
    connections = tuple(
        Connection(source=Ref.doc(a), target=Ref.doc(b), label="next in timeline")
        for a, b in zip(TIMELINE, TIMELINE[1:]))
    return Workspace(
        documents=documents,
        relevant=relevant,
        highlights=highlights,
        annotations=annotations,
        clusters=clusters,
        connections=connections,
    )


def crescent_relevant_slice(ws: Workspace) -> Workspace:
    """The workspace as it looks on the board: only the filtered documents."""
    keep = ws.relevant
    return Workspace(
        documents=tuple(d for d in ws.documents if d.id in keep),
        relevant=keep,
        highlights=ws.highlights,
        annotations=ws.annotations,
        clusters=ws.clusters,
        connections=ws.connections,
    )


LITREVIEW_DOCS: list[tuple[str, str]] = [
    ("paper_1", (
        "We present a corpus of recorded analyst interactions with a visual "
        "analytics system, pairing every click, brush, and filter change "
        "with the chart state it produced. Models trained on the corpus "
        "predict the next likely user action and suggest views that shorten "
        "exploration paths."
    )),
    ("paper_2", (
        "This paper introduces a grammar for logging user actions in "
        "exploratory data analysis and shows that sequence models over the "
        "grammar recover common analysis strategies. We release the logger "
        "and a benchmark of annotated sessions."
    )),
    ("paper_3", (
        "We study how crowdworkers describe chart interactions in natural "
        "language and train a model that maps those descriptions onto "
        "executable interface commands, enabling instruction-driven "
        "manipulation of dashboards."
    )),
    ("paper_4", (
        "We collect think-aloud transcripts from analysts working through "
        "visual data exploration tasks and align each utterance with the "
        "interaction log. The aligned pairs train an assistant that "
        "verbalizes what a user is doing and proposes the next step."
    )),
    ("paper_5", (
        "We propose a model that generates natural-language insights from "
        "charts, trained on pairs of visualizations and the captions "
        "analysts wrote about them. Generated insights name the salient "
        "trend, outlier, or comparison a reader should notice."
    )),
    ("paper_6", (
        "This work crowdsources statements that readers take away from "
        "statistical graphics and organizes them into an insight taxonomy. "
        "Classifiers trained on the taxonomy retrieve charts that support a "
        "claim and flag claims a chart cannot support."
    )),
    ("paper_7", (
        "We fine-tune a language model on tables paired with expert-written "
        "analytical summaries, producing data facts ranked by interest. The "
        "model's facts transfer to unseen tables and correlate with what "
        "analysts choose to report."
    )),
]

LITREVIEW_CLUSTERS: list[tuple[str, str, list[str]]] = [
    ("user-action", "User Action", ["paper_1", "paper_2", "paper_3", "paper_4"]),
    ("insight", "Insight", ["paper_5", "paper_6", "paper_7"]),
]

LITREVIEW_HIGHLIGHTS: list[tuple[str, str]] = [
    ("paper_1", "recorded analyst interactions"),
    ("paper_2", "grammar for logging user actions"),
    ("paper_3", "maps those descriptions onto executable interface commands"),
    ("paper_4", "think-aloud transcripts"),
    ("paper_5", "generates natural-language insights from charts"),
    ("paper_6", "insight taxonomy"),
    ("paper_7", "data facts ranked by interest"),
]

LITREVIEW_ANNOTATIONS: list[tuple[str, str]] = [
    ("paper_1", "Original description cites its study of 32 analysts, not in the abstract"),
    ("paper_3", "Referred to for command mapping; evaluation corpus is named only in the paper body"),
    ("paper_5", "Cited as the first caption-trained insight generator"),
    ("paper_7", "The interestingness ranking is the part the survey relies on"),
]


def litreview_workspace() -> Workspace:
    documents = tuple(Document(id=i, body=b) for i, b in LITREVIEW_DOCS)
    bodies = {d.id: d.body for d in documents}
    return Workspace(
        documents=documents,
        relevant=frozenset(bodies),
        highlights=tuple(
            _highlight(bodies, doc_id, text)
            for doc_id, text in LITREVIEW_HIGHLIGHTS),
        annotations=tuple(
            Annotation(target=t, text=x) for t, x in LITREVIEW_ANNOTATIONS),
        clusters=tuple(
            Cluster(id=cid, name=name, members=tuple(members))
            for cid, name, members in LITREVIEW_CLUSTERS),
        connections=(),
    )


def _write(path: Path, data: bytes | str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    if isinstance(data, str):
        data = data.encode("utf-8")
    path.write_bytes(data)
    print(f"wrote {path.relative_to(FIXTURES.parent.parent)} ({len(data)} bytes)")


def main() -> int:
    crescent = crescent_workspace()
    problems = validate(crescent)
    if problems:
        for v in problems:
            print(f"crescent: {v.rule} at {v.entity}: {v.message}", file=sys.stderr)
        return 1
    assert len(crescent.documents) == 40, len(crescent.documents)
    assert len(crescent.relevant) == 23, len(crescent.relevant)
    clustered = {m for c in crescent.clusters for m in c.members}
    assert clustered == crescent.relevant

    litreview = litreview_workspace()
    problems = validate(litreview)
    if problems:
        for v in problems:
            print(f"litreview: {v.rule} at {v.entity}: {v.message}", file=sys.stderr)
        return 1

    _write(FIXTURES / "crescent_workspace.json", serialize(crescent))
    _write(FIXTURES / "litreview_workspace.json", serialize(litreview))

    board = export_board(crescent_relevant_slice(crescent))
    _write(FIXTURES / "crescent_board.json",
           json.dumps(board, ensure_ascii=False, indent=2) + "\n")

    template = load_default_template()
    for name in PRESETS:
        bundle = assemble_prompt(crescent, PRESETS[name], template)
        _write(FIXTURES / "goldens" / f"{name}.json",
               json.dumps(bundle.to_dict(), ensure_ascii=False, indent=2) + "\n")

    plan = {
        "plan_id": "crescent-smoke",
        "workspace": "crescent_workspace.json",
        "conditions": ["E1", "E3", "E11"],
        "replications": 2,
    }
    _write(FIXTURES / "crescent_plan.json",
           json.dumps(plan, ensure_ascii=False, indent=2) + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
