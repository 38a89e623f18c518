#!/usr/bin/env python3
"""Regenerates the shipped data files under data/.

Everything is derived from fixed seeds, so repeated runs produce identical
files. The user goal database (data/user_goals.json) is not written here:
it is extracted from data/corpus.json by `dialsim build-goals`.
"""

import argparse
import json
import random
from pathlib import Path

INTENTS = [
    "request", "inform", "confirm_question", "confirm_answer", "deny", "thanks",
    "closing", "multiple_choice", "greeting", "not_sure", "welcome",
]

# name, informable, requestable
SLOTS = [
    ("moviename", True, True),
    ("starttime", True, True),
    ("theater", True, True),
    ("numberofpeople", True, False),
    ("city", True, True),
    ("date", True, True),
    ("state", True, True),
    ("ticket", False, True),
    ("taskcomplete", True, False),
    ("genre", True, True),
    ("mpaa_rating", True, True),
    ("critic_rating", True, True),
    ("actor", True, True),
    ("director", True, True),
    ("release_year", True, True),
    ("actress", True, True),
    ("zip", True, True),
    ("distanceconstraints", True, True),
    ("price", True, True),
    ("seating", True, True),
    ("theater_chain", True, True),
    ("video_format", True, True),
    ("description", False, True),
    ("numberofkids", True, False),
    ("movie_series", True, True),
    ("other", True, True),
    ("subtitles", True, True),
    ("duration", True, True),
    ("language", True, True),
]

REQUIRED = ["moviename", "theater", "starttime", "date", "numberofpeople"]

CITIES = {
    "seattle": ("wa", ["amc pacific place 11 theater", "regal meridian 16", "cinerama", "amc lowes oak tree 6"]),
    "birmingham": ("al", ["carmike summit 16", "amc patton creek 12"]),
    "los angeles": ("ca", ["regal la live stadium 14", "amc century city 15", "arclight hollywood"]),
    "portland": ("or", ["regal fox tower stadium 10", "living room theaters"]),
    "chicago": ("il", ["amc river east 21", "music box theatre"]),
    "houston": ("tx", ["amc studio 30", "edwards marq e stadium 23"]),
}
CHAINS = {"amc": "amc", "regal": "regal", "carmike": "carmike", "edwards": "regal", "arclight": "arclight"}

MOVIES = {
    "deadpool": ("action", "r", "84%", "ryan reynolds", "morena baccarin", "tim miller", "2016", "108 min"),
    "zoolander 2": ("comedy", "pg-13", "23%", "ben stiller", "penelope cruz", "ben stiller", "2016", "102 min"),
    "10 cloverfield lane": ("thriller", "pg-13", "90%", "john goodman", "mary elizabeth winstead", "dan trachtenberg", "2016", "103 min"),
    "kung fu panda 3": ("animation", "pg", "87%", "jack black", "angelina jolie", "jennifer yuh nelson", "2016", "95 min"),
    "the witch": ("horror", "r", "91%", "ralph ineson", "anya taylor-joy", "robert eggers", "2016", "92 min"),
    "zootopia": ("animation", "pg", "98%", "jason bateman", "ginnifer goodwin", "byron howard", "2016", "108 min"),
    "London has fallen": ("action", "r", "26%", "gerard butler", "angela bassett", "babak najafi", "2016", "99 min"),
    "eddie the eagle": ("drama", "pg-13", "81%", "taron egerton", "jo hartley", "dexter fletcher", "2016", "106 min"),
    "race": ("drama", "pg-13", "62%", "stephan james", "shanice banton", "stephen hopkins", "2016", "134 min"),
    "gods of egypt": ("fantasy", "pg-13", "15%", "gerard butler", "courtney eaton", "alex proyas", "2016", "127 min"),
    "the revenant": ("drama", "r", "78%", "leonardo dicaprio", "grace dove", "alejandro inarritu", "2015", "156 min"),
    "star wars": ("science fiction", "pg-13", "93%", "harrison ford", "daisy ridley", "j j abrams", "2015", "136 min"),
}
MOVIES = {k.lower(): v for k, v in MOVIES.items()}

DATES = ["today", "tomorrow", "friday", "saturday", "sunday"]
TIMES = ["10:30am", "11:45am", "1:00 pm", "2:30 pm", "4:10 pm", "5:20 pm", "6:45 pm", "7:30 pm", "8:15 pm", "9:50 pm", "10:40 pm"]
ZIPS = {"seattle": "98101", "birmingham": "35243", "los angeles": "90015", "portland": "97205", "chicago": "60611", "houston": "77056"}


def display(slot):
    return {
        "moviename": "movie", "starttime": "start time", "numberofpeople": "number of tickets",
        "mpaa_rating": "mpaa rating", "critic_rating": "critic rating", "release_year": "release year",
        "distanceconstraints": "distance", "theater_chain": "theater chain", "video_format": "video format",
        "numberofkids": "number of kids", "movie_series": "movie series", "zip": "zip code",
    }.get(slot, slot.replace("_", " "))


def schema_json(intents, slots, required, max_turn):
    return {
        "intents": intents,
        "slots": [{"name": n, "informable": i, "requestable": r} for n, i, r in slots],
        "required_slots": required,
        "default_request_slot": "ticket",
        "max_turn": max_turn,
    }


def movie_attrs(name):
    g, mpaa, critic, actor, actress, director, year, dur = MOVIES[name]
    return {
        "genre": g, "mpaa_rating": mpaa, "critic_rating": critic, "actor": actor, "actress": actress,
        "director": director, "release_year": year, "duration": dur, "language": "english",
        "subtitles": "none", "description": f"{name} ({g}, {year})",
    }


def theater_attrs(city, theater, rng):
    chain = next((v for k, v in CHAINS.items() if theater.startswith(k)), "independent")
    return {
        "theater_chain": chain, "zip": ZIPS[city],
        "price": rng.choice(["$9", "$12", "$14", "$16"]),
        "seating": rng.choice(["reserved", "open"]),
        "video_format": rng.choice(["2d", "3d", "imax"]),
    }


def build_movie_kb():
    rng = random.Random(20160101)
    anchors = [
        ("deadpool", "birmingham", "today", "4 pm", "carmike summit 16"),
        ("deadpool", "seattle", "tomorrow", "9:00 pm", "amc pacific place 11 theater"),
        ("zoolander 2", "seattle", "tomorrow", "9:25 pm", "regal meridian 16"),
        ("10 cloverfield lane", "los angeles", "tomorrow", "11:45am", "regal la live stadium 14"),
    ]
    rows, seen = [], set()
    theater_info = {}

    def add(movie, city, date, time, theater):
        key = (movie, city, date, time, theater)
        if key in seen:
            return
        seen.add(key)
        if theater not in theater_info:
            theater_info[theater] = theater_attrs(city, theater, rng)
        row = {"moviename": movie, "city": city, "state": CITIES[city][0], "date": date,
               "starttime": time, "theater": theater}
        row.update(movie_attrs(movie))
        row.update(theater_info[theater])
        if movie == "star wars":
            row["movie_series"] = "star wars"
        rows.append(row)

    for a in anchors:
        add(*a)
    movies = sorted(MOVIES)
    while len(rows) < 240:
        movie = rng.choice(movies)
        city = rng.choice(sorted(CITIES))
        theater = rng.choice(CITIES[city][1])
        # Keeps the birmingham showing the only deadpool screening at 4 pm.
        add(movie, city, rng.choice(DATES), rng.choice(TIMES), theater)
    return rows


def kb_matches(kb, constraints):
    """Rows satisfying the constraints; slots no row defines are not searchable."""
    defined = {k for row in kb for k in row}
    out = []
    for row in kb:
        if all(v == "anything" or k not in defined or row.get(k) == v for k, v in constraints.items()):
            out.append(row)
    return out


# ---------------------------------------------------------------- templates

def T(speaker, intent, text, inform=(), request=(), values=None):
    e = {"speaker": speaker, "intent": intent, "inform_slots": list(inform),
         "request_slots": list(request), "template": text}
    if values:
        e["values"] = values
    return e


def default_templates():
    content = [n for n, i, _ in SLOTS if i and n != "taskcomplete"]
    requestable = [n for n, _, r in SLOTS if r]
    t = []
    # user opening turns
    t += [
        T("usr", "request", "Can I buy tickets for $moviename$?", ["moviename"], ["ticket"]),
        T("usr", "request", "Can I buy tickets for $moviename$ at $city$?", ["moviename", "city"], ["ticket"]),
        T("usr", "request", "Can I get tickets for $moviename$ on $date$?", ["moviename", "date"], ["ticket"]),
        T("usr", "request", "I need $numberofpeople$ tickets for $moviename$.", ["moviename", "numberofpeople"], ["ticket"]),
        T("usr", "request", "Which theater will play the $moviename$ at $starttime$?", ["moviename", "starttime"], ["theater"]),
        T("usr", "request", "Which theater will play $moviename$?", ["moviename"], ["theater"]),
        T("usr", "request", "What is the start time for $moviename$?", ["moviename"], ["starttime"]),
        T("usr", "request", "Which theater can I book $numberofpeople$ tickets for $moviename$?", ["moviename", "numberofpeople"], ["theater"]),
        T("usr", "request", "What time is $moviename$ playing $date$?", ["moviename", "date"], ["starttime"]),
    ]
    user_inform = {
        "moviename": "I want to watch $moviename$.",
        "starttime": "I want to watch at $starttime$.",
        "city": "I want to watch in $city$.",
        "theater": "I want to go to $theater$.",
        "date": "I want to set it up $date$",
        "numberofpeople": "I want $numberofpeople$ tickets please!",
        "state": "I need tickets at $state$.",
        "zip": "My zip code is $zip$.",
        "numberofkids": "I am bringing $numberofkids$ kids.",
    }
    for s in content:
        t.append(T("usr", "inform", user_inform.get(s, f"I would like the {display(s)} to be ${s}$."), [s]))
        dont_care = "I do not care." if s == "city" else f"Any {display(s)} is fine."
        t.append(T("usr", "inform", dont_care, [s], values={s: "anything"}))
    t.append(T("usr", "inform", "I want to watch $moviename$ in $city$.", ["moviename", "city"]))
    t.append(T("usr", "inform", "I want $numberofpeople$ tickets for $date$.", ["numberofpeople", "date"]))
    user_request = {
        "ticket": "Can you book the tickets?",
        "theater": "Which theater is available?",
        "starttime": "What time is it playing?",
        "description": "What is it about?",
    }
    for s in requestable:
        t.append(T("usr", "request", user_request.get(s, f"What is the {display(s)}?"), [], [s]))
    t += [
        T("usr", "deny", "That is not what I asked for. Can you book the right tickets?", [], ["ticket"]),
        T("usr", "deny", "No, that is wrong."),
        T("usr", "thanks", "Thank you"),
        T("usr", "closing", "Bye."),
        T("usr", "not_sure", "I am not sure."),
        T("usr", "greeting", "Hello."),
        T("usr", "confirm_answer", "Yes, that is right."),
        T("usr", "welcome", "You are welcome."),
    ]
    # agent turns
    agent_request = {
        "moviename": "What movie are you interested in?",
        "starttime": "And what start time do you like?",
        "city": "Which city do you want to buy the ticket?",
        "theater": "Which theater do you want?",
        "date": "What date would you like?",
        "numberofpeople": "How many tickets do you need?",
        "state": "Which state are you in?",
    }
    for s in content:
        t.append(T("sys", "request", agent_request.get(s, f"What {display(s)} would you like?"), [], [s]))
    agent_inform = {
        "starttime": "$starttime$ is available.",
        "theater": "The theater is $theater$.",
    }
    for s in content:
        t.append(T("sys", "inform", agent_inform.get(s, f"The {display(s)} is ${s}$."), [s]))
        t.append(T("sys", "inform", f"Sorry, I cannot find a matching {display(s)}.", [s],
                   values={s: "no match available"}))
    t += [
        T("sys", "inform", "Okay, your tickets were booked.", ["taskcomplete"], values={"taskcomplete": "taskcomplete"}),
        T("sys", "inform", "Sorry, there are no tickets available.", ["taskcomplete"],
          values={"taskcomplete": "no ticket available"}),
        T("sys", "multiple_choice", "Which theater do you prefer: $theater$?", ["theater"]),
        T("sys", "multiple_choice", "Which start time do you prefer: $starttime$?", ["starttime"]),
        T("sys", "confirm_question", "Do you want to watch $moviename$?", ["moviename"]),
        T("sys", "confirm_answer", "Yes."),
        T("sys", "deny", "No."),
        T("sys", "thanks", "thanks"),
        T("sys", "closing", "Goodbye."),
        T("sys", "greeting", "Hello, how can I help you?"),
        T("sys", "welcome", "You are welcome."),
        T("sys", "not_sure", "I am not sure what you mean."),
    ]
    return t


def restrict_templates(templates, intents, slots):
    out = []
    for e in templates:
        used = set(e["inform_slots"]) | set(e["request_slots"])
        if e["intent"] in intents and used <= slots:
            out.append(e)
    return out


# ---------------------------------------------------------------- corpus

def act(speaker, intent, inform=None, request=(), utterance=""):
    return {"speaker": speaker, "intent": intent, "inform_slots": dict(inform or {}),
            "request_slots": {s: "UNK" for s in request}, "utterance": utterance}


def build_corpus(kb, n):
    rng = random.Random(280)
    dialogues = []
    for d in range(n):
        row = rng.choice(kb)
        constraints = {"moviename": row["moviename"], "numberofpeople": str(rng.randint(1, 5))}
        for s in ["date", "city", "theater", "starttime", "state"]:
            if rng.random() < 0.6:
                constraints[s] = row[s]
        requests = ["ticket"] + [s for s in ["theater", "starttime", "date"] if s not in constraints]
        if rng.random() < 0.15:
            requests.append(rng.choice(["genre", "mpaa_rating", "price", "duration"]))
        if d % 9 == 4:
            # Occasionally a booking for a showing that does not exist.
            constraints["date"] = "monday"
        if d % 11 == 7:
            # Never mentions party size: not a usable goal.
            constraints.pop("numberofpeople")
        turns = []
        if rng.random() < 0.3:
            turns += [act("usr", "greeting", utterance="Hello."),
                      act("sys", "greeting", utterance="Hello, how can I help you?")]
        first_keys = ["moviename"] + [s for s in constraints if s != "moviename" and rng.random() < 0.4]
        first_req = [rng.choice(requests)]
        if rng.random() < 0.2 and first_req != ["ticket"]:
            first_req.append("ticket")
        if rng.random() < 0.1 and first_req != ["ticket"]:
            first_req = [r for r in first_req if r != "ticket"]
        turns.append(act("usr", "request", {k: constraints[k] for k in first_keys}, first_req))
        missing = [k for k in constraints if k not in first_keys]
        open_questions = [r for r in first_req if r != "ticket"]
        later = [r for r in requests if r not in first_req and r != "ticket"]
        while True:
            if open_questions:
                r = open_questions.pop(0)
                turns.append(act("sys", "inform", {r: row.get(r, "unknown")}))
            elif missing:
                turns.append(act("sys", "request", request=[missing[0]]))
                s = missing.pop(0)
                turns.append(act("usr", "inform", {s: constraints[s]}))
                continue
            else:
                break
            if later:
                r = later.pop(0)
                open_questions.append(r)
                turns.append(act("usr", "request", request=[r]))
            elif missing:
                s = missing.pop(0)
                turns.append(act("usr", "inform", {s: constraints[s]}))
            else:
                turns.append(act("usr", "confirm_answer"))
        turns.append(act("sys", "inform", {"taskcomplete": "taskcomplete"}))
        turns.append(act("usr", "thanks"))
        turns.append(act("sys", "thanks"))
        dialogues.append(turns)
    return dialogues


# ---------------------------------------------------------------- goals

def goal(inform, request):
    return {"inform_slots": dict(inform), "request_slots": {s: "UNK" for s in request}}


def curated_goals(kb, n):
    rng = random.Random(5)
    out, seen = [], set()
    while len(out) < n:
        row = rng.choice(kb)
        c = {s: row[s] for s in ["moviename", "theater", "starttime", "date"]}
        c["numberofpeople"] = str(rng.randint(1, 6))
        if rng.random() < 0.5:
            c["city"] = row["city"]
        key = json.dumps(c, sort_keys=True)
        if key not in seen:
            seen.add(key)
            out.append(goal(c, ["ticket"]))
    return out


def extra_request_goals(kb, n):
    rng = random.Random(6)
    out = []
    for i in range(n):
        row = rng.choice(kb)
        extra = [["theater"], ["starttime"], ["theater", "starttime"]][i % 3]
        c = {s: row[s] for s in ["moviename", "theater", "starttime", "date"] if s not in extra}
        c["numberofpeople"] = str(rng.randint(1, 6))
        out.append(goal(c, ["ticket"] + extra))
    return out


# ---------------------------------------------------------------- tiny domain

TINY_INTENTS = ["request", "inform", "deny", "thanks", "closing"]
TINY_SLOTS = [
    ("moviename", True, True), ("theater", True, True), ("starttime", True, True),
    ("date", True, True), ("numberofpeople", True, False), ("city", True, True),
    ("ticket", False, True), ("taskcomplete", True, False),
]


def tiny_kb():
    rng = random.Random(8)
    movies = ["deadpool", "zoolander 2", "zootopia", "the witch", "race", "star wars", "kung fu panda 3", "the revenant"]
    cities = {"seattle": ["regal meridian 16", "cinerama"], "birmingham": ["carmike summit 16", "amc patton creek 12"],
              "portland": ["living room theaters", "regal fox tower stadium 10"]}
    dates = ["today", "tomorrow", "friday"]
    times = ["1:00 pm", "4 pm", "7:30 pm", "9:50 pm"]
    rows, seen = [], set()
    while len(rows) < 100:
        city = rng.choice(sorted(cities))
        r = {"moviename": rng.choice(movies), "theater": rng.choice(cities[city]), "city": city,
             "date": rng.choice(dates), "starttime": rng.choice(times)}
        key = tuple(sorted(r.items()))
        if key not in seen:
            seen.add(key)
            rows.append(r)
    return rows


def tiny_goals(kb):
    rng = random.Random(9)
    goals, seen = [], set()

    def push(c, r):
        key = json.dumps([c, r], sort_keys=True)
        if key in seen:
            return False
        seen.add(key)
        goals.append(goal(c, r))
        return True

    # 40 plain bookings, 14 with an extra question, 10 that the KB cannot serve.
    while len(goals) < 40:
        row = rng.choice(kb)
        c = {"moviename": row["moviename"], "numberofpeople": str(rng.randint(1, 4))}
        for s in ["theater", "starttime", "date", "city"]:
            if rng.random() < 0.5:
                c[s] = row[s]
        push(c, ["ticket"])
    while len(goals) < 54:
        row = rng.choice(kb)
        extra = rng.choice(["theater", "starttime"])
        c = {"moviename": row["moviename"], "numberofpeople": str(rng.randint(1, 4))}
        for s in ["theater", "starttime", "date", "city"]:
            if s != extra and rng.random() < 0.5:
                c[s] = row[s]
        push(c, ["ticket", extra])
    while len(goals) < 64:
        row = rng.choice(kb)
        c = {"moviename": row["moviename"], "numberofpeople": str(rng.randint(1, 4)),
             "date": rng.choice(["saturday", "sunday"]), "theater": row["theater"]}
        assert not kb_matches(kb, c)
        push(c, ["ticket"])
    order = list(range(len(goals)))
    rng.shuffle(order)
    return [goals[i] for i in order]


def write(path, obj):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        json.dump(obj, f, indent=1)
        f.write("\n")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "data"))
    out = Path(ap.parse_args().out)

    write(out / "schema.json", schema_json(INTENTS, SLOTS, REQUIRED, 40))
    kb = build_movie_kb()
    write(out / "movie_kb.json", kb)
    write(out / "corpus.json", build_corpus(kb, 160))
    templates = default_templates()
    write(out / "templates.json", templates)
    write(out / "curated_goals.json", curated_goals(kb, 40))
    write(out / "extra_request_goals.json", extra_request_goals(kb, 30))

    tkb = tiny_kb()
    write(out / "tiny" / "schema.json", schema_json(TINY_INTENTS, TINY_SLOTS, ["moviename", "numberofpeople"], 20))
    write(out / "tiny" / "movie_kb.json", tkb)
    write(out / "tiny" / "goals.json", tiny_goals(tkb))
    write(out / "tiny" / "templates.json",
          restrict_templates(templates, set(TINY_INTENTS), {n for n, _, _ in TINY_SLOTS}))


if __name__ == "__main__":
    main()
