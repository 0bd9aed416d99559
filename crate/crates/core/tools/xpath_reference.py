#!/usr/bin/env python3
"""Generates the XPath differential corpus using lxml as the reference evaluator.

Each case holds a document, a query in the supported subset and the expected
result list. Name tests are translated to local-name() tests so the reference
matches regardless of namespaces.

Usage: python3 tools/xpath_reference.py [--seed N] [--count N] [--out PATH]
"""

import argparse
import json
import random
from pathlib import Path

from lxml import etree

NAMES = ["web-app", "servlet", "name", "param", "a", "b", "c"]
ATTRS = ["id", "k"]
ATTR_VALUES = ["1", "2", "x", "a b"]
WORDS = ["true", "false", "30", "x", "y & z", "a<b", "  padded  ", "", " "]
NAMESPACES = [None, None, None, "urn:ns:one", "http://java.sun.com/xml/ns/javaee"]


def escape_text(s):
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def escape_attr(s):
    return escape_text(s).replace('"', "&quot;")


def gen_element(rng, depth, ns, prefix):
    name = rng.choice(NAMES)
    tag = f"{prefix}:{name}" if prefix else name
    attrs = []
    for attr in rng.sample(ATTRS, rng.randint(0, len(ATTRS))):
        attrs.append(f'{attr}="{escape_attr(rng.choice(ATTR_VALUES))}"')
    parts = []
    if rng.random() < 0.6:
        parts.append(escape_text(rng.choice(WORDS)))
    if depth > 0:
        for _ in range(rng.randint(0, 3)):
            parts.append(gen_element(rng, depth - 1, ns, prefix))
            if rng.random() < 0.3:
                parts.append(escape_text(rng.choice(WORDS)))
    attr_text = "".join(" " + a for a in attrs)
    body = "".join(parts)
    return f"<{tag}{attr_text}>{body}</{tag}>" if body else f"<{tag}{attr_text}/>"


def gen_doc(rng):
    ns = rng.choice(NAMESPACES)
    prefix = "p" if ns and rng.random() < 0.5 else None
    root = gen_element(rng, rng.randint(1, 4), ns, prefix)
    if ns:
        decl = f' xmlns:p="{ns}"' if prefix else f' xmlns="{ns}"'
        head, sep, rest = root.partition(">")
        if head.endswith("/"):
            root = head[:-1] + decl + "/>"
        else:
            root = head + decl + sep + rest
    return root


def gen_query(rng):
    steps = []
    for _ in range(rng.randint(1, 4)):
        axis = "//" if rng.random() < 0.4 else "/"
        r = rng.random()
        if r < 0.15:
            test = "*"
        elif r < 0.45:
            test = "*" + rng.choice(NAMES)
        else:
            test = rng.choice(NAMES)
        preds = []
        for _ in range(rng.choices([0, 1, 2], [0.55, 0.35, 0.1])[0]):
            if rng.random() < 0.5:
                preds.append(("pos", rng.randint(1, 3)))
            else:
                quote = rng.choice(["'", '"'])
                preds.append(("attr", rng.choice(ATTRS), rng.choice(ATTR_VALUES), quote))
        steps.append((axis, test, preds))
    text = rng.random() < 0.5
    text_axis = "//" if rng.random() < 0.25 else "/"
    return steps, (text_axis if text else None)


def render_subset(steps, text_axis):
    out = []
    for axis, test, preds in steps:
        out.append(axis + test)
        for p in preds:
            if p[0] == "pos":
                out.append(f"[{p[1]}]")
            else:
                out.append(f"[@{p[1]}={p[3]}{p[2]}{p[3]}]")
    if text_axis:
        out.append(text_axis + "text()")
    return "".join(out)


def render_reference(steps):
    out = []
    for axis, test, preds in steps:
        name = test.lstrip("*")
        node = f"*[local-name()='{name}']" if name else "*"
        out.append(axis + node)
        for p in preds:
            if p[0] == "pos":
                out.append(f"[{p[1]}]")
            else:
                out.append(f"[@{p[1]}='{p[2]}']")
    return "".join(out)


def direct_text(el):
    parts = [el.text or ""]
    parts.extend(child.tail or "" for child in el)
    return "".join(parts).strip()


def canonical(el):
    name = etree.QName(el).localname
    attrs = sorted((etree.QName(k).localname, v) for k, v in el.attrib.items())
    out = "<" + name + "".join(f' {k}="{escape_attr(v)}"' for k, v in attrs)
    body = []
    if el.text and el.text.strip():
        body.append(escape_text(el.text.strip()))
    for child in el:
        body.append(canonical(child))
        if child.tail and child.tail.strip():
            body.append(escape_text(child.tail.strip()))
    if not body:
        return out + "/>"
    return out + ">" + "".join(body) + f"</{name}>"


def evaluate(doc_text, steps, text_axis):
    root = etree.fromstring(doc_text.encode())
    tree = root.getroottree()
    if text_axis is None:
        return [canonical(e) for e in tree.xpath(render_reference(steps))]
    base = render_reference(steps)
    if text_axis == "//":
        base += "/descendant-or-self::*"
    elements = tree.xpath(base)
    return [t for t in (direct_text(e) for e in elements) if t]


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--seed", type=int, default=20261018)
    parser.add_argument("--count", type=int, default=100)
    parser.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "fixtures/xpath/differential.json"))
    args = parser.parse_args()

    rng = random.Random(args.seed)
    cases = []
    empty = 0
    while len(cases) < args.count:
        doc = gen_doc(rng)
        steps, text_axis = gen_query(rng)
        expected = evaluate(doc, steps, text_axis)
        # keep the corpus mostly non-trivial
        if not expected:
            if empty >= args.count // 4:
                continue
            empty += 1
        cases.append({"doc": doc, "query": render_subset(steps, text_axis), "expected": expected})

    payload = {
        "reference": f"lxml {etree.__version__} / libxml2 {'.'.join(map(str, etree.LIBXML_VERSION))}",
        "seed": args.seed,
        "cases": cases,
    }
    Path(args.out).write_text(json.dumps(payload, indent=1, ensure_ascii=False) + "\n")
    print(f"wrote {len(cases)} cases ({empty} with empty results) to {args.out}")


if __name__ == "__main__":
    main()
