"""Built-in simulated task suite.

Five task families ship with the package: a login form, a paginated search
engine, tabbed link panels, a checkbox form, and a two-screen wizard. Each
family has ten deterministic instances; every instance carries its own site,
its natural-language task text, a ground-truth action sequence, and a table
of scripted model responses encoding the correct policy, so whole campaigns
run offline and reproducibly.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from ..dom import compute_xpath
from ..extractor import FeasibleAction, bind_context, describe_element, extract_feasible_actions
from ..llm import PURPOSE_INPUT_CONTENT, PURPOSE_NEXT_ACTION, ScriptEntry
from ..memory import action_line
from ..metrics import ReferenceAction
from .sim import SimEnvironment, SimSite, SimTransition


@dataclass
class TaskInstance:
    instance_id: str
    task_text: str
    site: SimSite
    entry: str
    ground_truth: list[ReferenceAction]
    policy_entries: list[ScriptEntry] = field(default_factory=list)


@dataclass
class TaskFamily:
    task_id: str
    instances: list[TaskInstance]


def _ordinal(n: int) -> str:
    if 10 <= n % 100 <= 20:
        suffix = "th"
    else:
        suffix = {1: "st", 2: "nd", 3: "rd"}.get(n % 10, "th")
    return f"{n}{suffix}"


def _decision(index: int, description: str) -> str:
    return json.dumps(
        {"chosen_action": index, "action_description": description, "reason": "scripted policy"},
        ensure_ascii=False,
    )


class PolicyBuilder:
    """Replays a plan (element id, operation) against a site through the real
    extraction pipeline, recording candidate indices at every step. Produces
    the scripted decision entries for the plan plus the ground-truth actions
    the replay actually executed.

    Entries are scoped to their instance by the memory-section task line
    ("You are asked to complete the following task: ..."), which appears only
    for the episode currently running; matching on the bare task text would
    also hit exemplar task lines inside the experience section.
    """

    def __init__(self, site: SimSite, task_text: str, input_contents: dict[str, str] | None = None):
        self.site = site
        self.task_text = task_text
        self.task_marker = f"You are asked to complete the following task: {task_text}"
        self.input_contents = input_contents or {}
        self.entries: list[ScriptEntry] = []
        self.ground_truth: list[ReferenceAction] = []

    def _candidate_index(self, env: SimEnvironment, obs, element_id: str, operation: str):
        actions = extract_feasible_actions(obs.document, obs.render_info)
        node = obs.document.find_by_id(element_id)
        if node is None:
            raise ValueError(f"element id {element_id!r} not found on page")
        xpath = compute_xpath(node)
        for index, action in enumerate(actions, start=1):
            if action.target.xpath == xpath and action.operation == operation:
                return index, action, actions
        raise ValueError(f"no feasible {operation!r} action on element {element_id!r}")

    def run(self, plan: list[tuple[str, str]], custom_matchers: list[dict] | None = None) -> "PolicyBuilder":
        env = SimEnvironment(self.site)
        obs = env.load(self.site.name)
        prev_line = ""
        for step, (element_id, operation) in enumerate(plan, start=1):
            index, action, _ = self._candidate_index(env, obs, element_id, operation)
            if custom_matchers is not None:
                matcher = custom_matchers[step - 1]
                contains = tuple(matcher.get("contains", ()))
                not_contains = tuple(matcher.get("not_contains", ()))
            elif step == 1:
                contains = ()
                not_contains = ("> STEP #1:",)
            else:
                contains = (f"> STEP #{step - 1}: {prev_line}",)
                not_contains = (f"> STEP #{step}:",)
            self.entries.append(
                ScriptEntry(
                    purpose=PURPOSE_NEXT_ACTION,
                    contains=(self.task_marker, *contains),
                    not_contains=not_contains,
                    response=_decision(index, action_line(action)),
                )
            )
            if operation in ("input", "select"):
                action = action.with_content(self.input_contents[element_id])
            self.ground_truth.append(
                ReferenceAction(
                    operation=action.operation,
                    xpath=action.target.xpath,
                    text=action.target.text,
                    input_content=action.input_content,
                )
            )
            prev_line = action_line(action)
            result = env.execute(action)
            if not result.ok:
                raise RuntimeError(f"policy replay failed at step {step}: {result.status}")
            obs = result.new_observation

        final_actions = extract_feasible_actions(obs.document, obs.render_info)
        done_index = len(final_actions) + 1
        self.entries.insert(
            0,
            ScriptEntry(
                purpose=PURPOSE_NEXT_ACTION,
                contains=(self.task_marker,),
                regex=(r"> STEP #\d+: " + re.escape(prev_line),),
                response=_decision(done_index, "DONE"),
            ),
        )
        for element_id, content in self.input_contents.items():
            node = None
            for page in self.site.pages:
                node = self.site.document(page).find_by_id(element_id)
                if node is not None:
                    break
            context = bind_context(node, node.document)
            self.entries.append(
                ScriptEntry(
                    purpose=PURPOSE_INPUT_CONTENT,
                    contains=(self.task_marker, f"Field context: {context}"),
                    response=content,
                )
            )
        return self


# --- login form ---------------------------------------------------------------

LOGIN_CASES = [
    ("test", "123"), ("alice", "s3cret"), ("bob", "hunter2"), ("carol", "pass9"),
    ("dave", "qwerty1"), ("erin", "letme1n"), ("frank", "0range"), ("grace", "t0ken"),
    ("heidi", "m0nkey"), ("ivan", "dr4gon"),
]

_LOGIN_PAGE = """<html>
<head><title>login form</title></head>
<body>
<div id="main">
<div id="header"><h2>Account Login</h2></div>
<div id="form">
<div class="field"><label for="username">Username</label><input id="username" type="text"/></div>
<div class="field"><label for="password">Password</label><input id="password" type="password"/></div>
<button id="login">Login</button>
</div>
</div>
</body>
</html>"""

_WELCOME_PAGE = """<html>
<head><title>login form</title></head>
<body>
<div id="main"><div id="header"><h2>Welcome!</h2></div><p>You are now logged in.</p></div>
</body>
</html>"""


def login_form_site(name: str, user: str, password: str) -> SimSite:
    site = SimSite(
        name=name,
        title="login form",
        start_page="login",
        pages={"login": _LOGIN_PAGE, "welcome": _WELCOME_PAGE},
        goal={"kind": "on_page", "page": "welcome"},
    )
    doc = site.document("login")
    transitions = [
        SimTransition("login", compute_xpath(doc.find_by_id("username")), "input", var="u", content=user),
        SimTransition("login", compute_xpath(doc.find_by_id("password")), "input", var="p", content=password),
        SimTransition(
            "login", compute_xpath(doc.find_by_id("login")), "click",
            require=(("p", password), ("u", user)), goto="welcome",
        ),
    ]
    site.transitions.extend(transitions)
    return site


def _login_family() -> TaskFamily:
    instances = []
    for number, (user, password) in enumerate(LOGIN_CASES, start=1):
        instance_id = f"i{number:02d}"
        name = f"login-form-{instance_id}"
        site = login_form_site(name, user, password)
        task = f"Login with the username '{user}' and the password '{password}'."
        builder = PolicyBuilder(
            site, task, input_contents={"username": user, "password": password}
        ).run([("username", "input"), ("password", "input"), ("login", "click")])
        instances.append(
            TaskInstance(
                instance_id=instance_id,
                task_text=task,
                site=site,
                entry=f"sim://{name}",
                ground_truth=builder.ground_truth,
                policy_entries=builder.entries,
            )
        )
    return TaskFamily(task_id="login-form", instances=instances)


# --- search engine with pagination ---------------------------------------------

SEARCH_CASES = [
    ("Macie", 8), ("Betty", 5), ("Odessa", 7), ("Ramiro", 4), ("Sheila", 9),
    ("Vance", 6), ("Lynda", 8), ("Gregor", 5), ("Pearl", 7), ("Ines", 6),
]

BASE_RESULTS = ["Leonie", "Dannie", "Myron", "Tonya", "Jess", "Marcella", "Rosalyn", "Hugo", "Salma"]

RESULTS_PER_PAGE = 3

_SEARCH_SKELETON = """<html>
<head><title>search engine</title></head>
<body>
<div id="main">
<div id="header"><h2>Search Engine</h2></div>
<div id="search-bar"><div id="form-row"><input id="query" type="text" placeholder="Search query"/><button class="" data-tampered="e0" id="search">Search</button></div></div>
{content}
</div>
</body>
</html>"""

_DETAIL_PAGE = """<html>
<head><title>search engine</title></head>
<body>
<div id="main">
<div id="header"><h2>Result</h2></div>
<div id="content"><p>You opened a search result.</p><a id="back" href="#back">Back to results</a></div>
</div>
</body>
</html>"""


def search_results(query: str, target: int) -> list[str]:
    results = list(BASE_RESULTS)
    results[target - 1] = query
    decoy = target - 4 if target >= 5 else 1
    if decoy >= 1:
        results[decoy - 1] = query
    return results


def _results_page(results: list[str], page: int, total_pages: int) -> str:
    first = (page - 1) * RESULTS_PER_PAGE
    rows = "\n".join(
        f'<div class="result"><a href="#result-{first + i + 1}" id="result-{first + i + 1}">{name}</a>'
        f"<p>Profile page of {name}.</p></div>"
        for i, name in enumerate(results[first:first + RESULTS_PER_PAGE])
    )
    pagination = [f"<span>Page {page} of {total_pages}</span>"]
    if page > 1:
        pagination.append('<a href="#prev" id="prev">≤</a>')
    if page < total_pages:
        pagination.append('<a href="#next" id="next">≥</a>')
    content = (
        f'<div id="page-content">\n{rows}\n</div>\n<div id="pagination">{"".join(pagination)}</div>'
    )
    return _SEARCH_SKELETON.format(content=content)


def search_engine_site(name: str, query: str, target: int) -> SimSite:
    results = search_results(query, target)
    total_pages = (len(results) + RESULTS_PER_PAGE - 1) // RESULTS_PER_PAGE
    pages = {
        "start": _SEARCH_SKELETON.format(
            content='<div id="page-content"><p>Enter a query and press Search.</p></div>'
        ),
        "detail": _DETAIL_PAGE,
    }
    for page in range(1, total_pages + 1):
        pages[f"results{page}"] = _results_page(results, page, total_pages)

    site = SimSite(
        name=name,
        title="search engine",
        start_page="start",
        pages=pages,
        goal={"kind": "vars_equal", "vars": {"opened": str(target)}},
    )
    transitions = []
    searchable = ["start"] + [f"results{p}" for p in range(1, total_pages + 1)]
    for page_name in searchable:
        doc = site.document(page_name)
        transitions.append(
            SimTransition(page_name, compute_xpath(doc.find_by_id("query")), "input", var="query", content=query)
        )
        transitions.append(
            SimTransition(
                page_name, compute_xpath(doc.find_by_id("search")), "click",
                require=(("query", query),), goto="results1",
            )
        )
    for page in range(1, total_pages + 1):
        doc = site.document(f"results{page}")
        if page < total_pages:
            transitions.append(
                SimTransition(f"results{page}", compute_xpath(doc.find_by_id("next")), "click", goto=f"results{page + 1}")
            )
        if page > 1:
            transitions.append(
                SimTransition(f"results{page}", compute_xpath(doc.find_by_id("prev")), "click", goto=f"results{page - 1}")
            )
        first = (page - 1) * RESULTS_PER_PAGE
        for i in range(first, min(first + RESULTS_PER_PAGE, len(results))):
            transitions.append(
                SimTransition(
                    f"results{page}", compute_xpath(doc.find_by_id(f"result-{i + 1}")), "click",
                    set_vars=(("opened", str(i + 1)),), goto="detail",
                )
            )
    detail_doc = site.document("detail")
    transitions.append(
        SimTransition("detail", compute_xpath(detail_doc.find_by_id("back")), "click", goto="results1")
    )
    site.transitions.extend(transitions)
    return site


def _search_family() -> TaskFamily:
    instances = []
    for number, (query, target) in enumerate(SEARCH_CASES, start=1):
        instance_id = f"i{number:02d}"
        name = f"search-engine-{instance_id}"
        site = search_engine_site(name, query, target)
        task = (
            f"Use the textbox to enter '{query}' and press 'Search', "
            f"then find and click on the {_ordinal(target)} search result."
        )
        target_page = (target - 1) // RESULTS_PER_PAGE + 1
        plan = [("query", "input"), ("search", "click")]
        plan += [("next", "click")] * (target_page - 1)
        plan += [(f"result-{target}", "click")]
        builder = PolicyBuilder(site, task, input_contents={"query": query}).run(plan)
        instances.append(
            TaskInstance(
                instance_id=instance_id,
                task_text=task,
                site=site,
                entry=f"sim://{name}",
                ground_truth=builder.ground_truth,
                policy_entries=builder.entries,
            )
        )
    return TaskFamily(task_id="search-engine", instances=instances)


# --- tabbed links ---------------------------------------------------------------

TAB_CASES = [
    ("Nolan", 2), ("Imelda", 1), ("Yusuf", 3), ("Petra", 4), ("Quinn", 2),
    ("Ruben", 3), ("Selma", 1), ("Tobias", 4), ("Ursula", 2), ("Viggo", 4),
]

TAB_FILLERS = ["Alma", "Boris", "Cleo", "Dmitri", "Edna", "Felix", "Gilda", "Horst"]

TAB_COUNT = 4

_TAB_PAGE = """<html>
<head><title>tabbed links</title></head>
<body>
<div id="main">
<div id="tabs">{tabs}</div>
<div id="panel">{links}</div>
</div>
</body>
</html>"""

_TAB_DETAIL = """<html>
<head><title>tabbed links</title></head>
<body>
<div id="main"><p>You opened the link.</p></div>
</body>
</html>"""


def tabbed_links_site(name: str, target: str, target_tab: int) -> SimSite:
    tab_buttons = "".join(
        f'<button class="tab" id="tab-{k}">Tab {k}</button>' for k in range(1, TAB_COUNT + 1)
    )
    pages = {"detail": _TAB_DETAIL}
    link_names: dict[int, list[str]] = {}
    for k in range(1, TAB_COUNT + 1):
        names = [TAB_FILLERS[2 * (k - 1)], TAB_FILLERS[2 * (k - 1) + 1]]
        if k == target_tab:
            names[0] = target
        link_names[k] = names
        links = "".join(
            f'<a href="#{i}" id="link-{k}-{i + 1}">{link_name}</a>' for i, link_name in enumerate(names)
        )
        pages[f"tab{k}"] = _TAB_PAGE.format(tabs=tab_buttons, links=links)

    site = SimSite(
        name=name,
        title="tabbed links",
        start_page="tab1",
        pages=pages,
        goal={"kind": "vars_equal", "vars": {"opened": target}},
    )
    transitions = []
    for j in range(1, TAB_COUNT + 1):
        doc = site.document(f"tab{j}")
        for k in range(1, TAB_COUNT + 1):
            if j != k:
                transitions.append(
                    SimTransition(f"tab{j}", compute_xpath(doc.find_by_id(f"tab-{k}")), "click", goto=f"tab{k}")
                )
        for i, link_name in enumerate(link_names[j], start=1):
            transitions.append(
                SimTransition(
                    f"tab{j}", compute_xpath(doc.find_by_id(f"link-{j}-{i}")), "click",
                    set_vars=(("opened", link_name),), goto="detail",
                )
            )
    site.transitions.extend(transitions)
    return site


def _tab_click_line(site: SimSite, k: int) -> str:
    # the tab bar layout is identical on every tab page
    doc = site.document("tab1")
    node = doc.find_by_id(f"tab-{k}")
    return action_line(FeasibleAction(operation="click", target=describe_element(node)))


def _tab_matchers(site: SimSite, target_tab: int) -> list[dict]:
    """Memory-content matcher specs for the exploration plan. They key on the
    full visited-tab history, so a limited memory window that hides earlier
    tab clicks makes them miss (the behavior the ablation measures)."""
    matchers: list[dict] = [{"not_contains": ["> STEP #1:"]}]
    for s in range(2, target_tab + 1):
        contains = [f"> STEP #{i}: {_tab_click_line(site, i + 1)}" for i in range(1, s)]
        matchers.append({"contains": contains, "not_contains": [f"> STEP #{s}:"]})
    return matchers


def _tabbed_family() -> TaskFamily:
    instances = []
    for number, (target, target_tab) in enumerate(TAB_CASES, start=1):
        instance_id = f"i{number:02d}"
        name = f"tabbed-links-{instance_id}"
        site = tabbed_links_site(name, target, target_tab)
        task = f"Switch between the tabs to find and click the link '{target}'."

        task_marker = f"You are asked to complete the following task: {task}"
        plan = [(f"tab-{k}", "click") for k in range(2, target_tab + 1)]
        plan.append((f"link-{target_tab}-1", "click"))  # target replaces the first link slot
        builder = PolicyBuilder(site, task).run(plan, custom_matchers=_tab_matchers(site, target_tab))

        # Entries that fire only when the memory window hides earlier tab
        # clicks: the policy loses its place and goes back to Tab 2.
        env = SimEnvironment(site)
        obs = env.load(site.name)
        actions = extract_feasible_actions(obs.document, obs.render_info)
        tab2_index = next(
            index for index, action in enumerate(actions, start=1)
            if action.target.attributes.get("id") == "tab-2"
        )
        for k in range(3, TAB_COUNT + 1):
            builder.entries.append(
                ScriptEntry(
                    purpose=PURPOSE_NEXT_ACTION,
                    contains=(task_marker, f"> STEP #1: {_tab_click_line(site, k)}"),
                    not_contains=("> STEP #2:",),
                    response=_decision(tab2_index, "click Tab 2 (lost place)"),
                )
            )

        instances.append(
            TaskInstance(
                instance_id=instance_id,
                task_text=task,
                site=site,
                entry=f"sim://{name}",
                ground_truth=builder.ground_truth,
                policy_entries=builder.entries,
            )
        )
    return TaskFamily(task_id="tabbed-links", instances=instances)


# --- checkbox form ---------------------------------------------------------------

CHECKBOX_WORDS = ["alpha", "beta", "gamma", "delta"]

CHECKBOX_CASES = [
    ("alpha", "gamma"), ("beta", "delta"), ("alpha",), ("beta", "gamma", "delta"),
    ("alpha", "beta"), ("gamma",), ("alpha", "delta"), ("beta", "gamma"),
    ("alpha", "beta", "gamma", "delta"), ("delta",),
]

_CHECKBOX_PAGE = """<html>
<head><title>checkbox form</title></head>
<body>
<div id="main">
<div id="header"><h2>Preferences</h2></div>
<div id="boxes">
{rows}
</div>
<button id="submit">Submit</button>
</div>
</body>
</html>"""

_SUBMITTED_PAGE = """<html>
<head><title>checkbox form</title></head>
<body>
<div id="main"><div id="header"><h2>Thanks!</h2></div><p>Your preferences were saved.</p></div>
</body>
</html>"""


def checkbox_site(name: str, chosen: tuple[str, ...]) -> SimSite:
    rows = "\n".join(
        f'<div class="row"><input id="cb-{word}" type="checkbox"/><label for="cb-{word}">{word}</label></div>'
        for word in CHECKBOX_WORDS
    )
    wanted = {f"cb-{word}": ("on" if word in chosen else "") for word in CHECKBOX_WORDS}
    site = SimSite(
        name=name,
        title="checkbox form",
        start_page="form",
        pages={"form": _CHECKBOX_PAGE.format(rows=rows), "submitted": _SUBMITTED_PAGE},
        goal={
            "kind": "all",
            "of": [
                {"kind": "on_page", "page": "submitted"},
                {"kind": "vars_equal", "vars": wanted},
            ],
        },
    )
    doc = site.document("form")
    transitions = []
    for word in CHECKBOX_WORDS:
        xpath = compute_xpath(doc.find_by_id(f"cb-{word}"))
        transitions.append(
            SimTransition("form", xpath, "click", require=((f"cb-{word}", ""),), set_vars=((f"cb-{word}", "on"),))
        )
        transitions.append(
            SimTransition("form", xpath, "click", require=((f"cb-{word}", "on"),), set_vars=((f"cb-{word}", ""),))
        )
    transitions.append(
        SimTransition("form", compute_xpath(doc.find_by_id("submit")), "click", goto="submitted")
    )
    site.transitions.extend(transitions)
    return site


def _quoted_list(words: tuple[str, ...]) -> str:
    quoted = [f"'{w}'" for w in words]
    if len(quoted) == 1:
        return quoted[0]
    return ", ".join(quoted[:-1]) + " and " + quoted[-1]


def _checkbox_family() -> TaskFamily:
    instances = []
    for number, chosen in enumerate(CHECKBOX_CASES, start=1):
        instance_id = f"i{number:02d}"
        name = f"checkbox-set-{instance_id}"
        site = checkbox_site(name, chosen)
        task = f"Select the checkboxes for {_quoted_list(chosen)} and then click Submit."
        plan = [(f"cb-{word}", "click") for word in CHECKBOX_WORDS if word in chosen]
        plan.append(("submit", "click"))
        builder = PolicyBuilder(site, task).run(plan)
        instances.append(
            TaskInstance(
                instance_id=instance_id,
                task_text=task,
                site=site,
                entry=f"sim://{name}",
                ground_truth=builder.ground_truth,
                policy_entries=builder.entries,
            )
        )
    return TaskFamily(task_id="checkbox-set", instances=instances)


# --- two-screen wizard ------------------------------------------------------------

WIZARD_CASES = [
    ("Ada Rook", "ada@rook.io"), ("Ben Cho", "ben@cho.dev"), ("Cal Voss", "cal@voss.net"),
    ("Dot Marr", "dot@marr.org"), ("Eliigh Finn", "eli@finn.co"), ("Fay Otto", "fay@otto.me"),
    ("Gus Hale", "gus@hale.io"), ("Ida Bloom", "ida@bloom.dev"), ("Jon Pike", "jon@pike.net"),
    ("Kay Ruiz", "kay@ruiz.org"),
]

_WIZARD_STEP1 = """<html>
<head><title>form wizard</title></head>
<body>
<div id="main">
<div id="header"><h2>Step 1 of 2</h2></div>
<div id="form"><div class="field"><label for="name">Name</label><input id="name" type="text"/></div><button id="next">Next</button></div>
</div>
</body>
</html>"""

_WIZARD_STEP2 = """<html>
<head><title>form wizard</title></head>
<body>
<div id="main">
<div id="header"><h2>Step 2 of 2</h2></div>
<div id="form"><div class="field"><label for="email">Email</label><input id="email" type="email"/></div><button id="finish">Finish</button></div>
</div>
</body>
</html>"""

_WIZARD_DONE = """<html>
<head><title>form wizard</title></head>
<body>
<div id="main"><div id="header"><h2>All set!</h2></div><p>Your details were submitted.</p></div>
</body>
</html>"""


def wizard_site(name: str, person: str, email: str) -> SimSite:
    site = SimSite(
        name=name,
        title="form wizard",
        start_page="step1",
        pages={"step1": _WIZARD_STEP1, "step2": _WIZARD_STEP2, "done": _WIZARD_DONE},
        goal={
            "kind": "all",
            "of": [
                {"kind": "on_page", "page": "done"},
                {"kind": "vars_equal", "vars": {"name": person, "email": email}},
            ],
        },
    )
    step1 = site.document("step1")
    step2 = site.document("step2")
    site.transitions.extend(
        [
            SimTransition("step1", compute_xpath(step1.find_by_id("name")), "input", var="name", content=person),
            SimTransition("step1", compute_xpath(step1.find_by_id("next")), "click", goto="step2"),
            SimTransition("step2", compute_xpath(step2.find_by_id("email")), "input", var="email", content=email),
            SimTransition("step2", compute_xpath(step2.find_by_id("finish")), "click", goto="done"),
        ]
    )
    return site


def _wizard_family() -> TaskFamily:
    instances = []
    for number, (person, email) in enumerate(WIZARD_CASES, start=1):
        instance_id = f"i{number:02d}"
        name = f"form-wizard-{instance_id}"
        site = wizard_site(name, person, email)
        task = (
            f"Fill in the name '{person}', continue to the next step, "
            f"then fill in the email '{email}' and finish."
        )
        builder = PolicyBuilder(
            site, task, input_contents={"name": person, "email": email}
        ).run([("name", "input"), ("next", "click"), ("email", "input"), ("finish", "click")])
        instances.append(
            TaskInstance(
                instance_id=instance_id,
                task_text=task,
                site=site,
                entry=f"sim://{name}",
                ground_truth=builder.ground_truth,
                policy_entries=builder.entries,
            )
        )
    return TaskFamily(task_id="form-wizard", instances=instances)


# --- suite assembly ------------------------------------------------------------


def builtin_suite() -> list[TaskFamily]:
    return [
        _login_family(),
        _search_family(),
        _tabbed_family(),
        _checkbox_family(),
        _wizard_family(),
    ]


def suite_policy_entries(suite: list[TaskFamily]) -> list[ScriptEntry]:
    entries: list[ScriptEntry] = []
    for family in suite:
        for instance in family.instances:
            entries.extend(instance.policy_entries)
    return entries


def large_action_site(name: str, action_count: int = 500, target_index: int = 250) -> SimSite:
    """Stress site: one page with ``action_count`` buttons; clicking the
    target button reaches the goal."""
    buttons = "\n".join(
        f'<button id="b{i}">Item {i}</button>' for i in range(1, action_count + 1)
    )
    html = f"<html>\n<head><title>large</title></head>\n<body>\n<div id=\"main\">\n{buttons}\n</div>\n</body>\n</html>"
    done = "<html>\n<head><title>large</title></head>\n<body>\n<div id=\"main\"><p>Done.</p></div>\n</body>\n</html>"
    site = SimSite(
        name=name,
        title="large",
        start_page="grid",
        pages={"grid": html, "finish": done},
        goal={"kind": "on_page", "page": "finish"},
    )
    doc = site.document("grid")
    site.transitions.append(
        SimTransition("grid", compute_xpath(doc.find_by_id(f"b{target_index}")), "click", goto="finish")
    )
    return site
