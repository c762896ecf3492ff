"""Independent oracles the tests compare the implementation against.

These deliberately re-derive results by brute force (linear folds and
scans, sequential simulation) instead of calling the production paths
they check.
"""

from __future__ import annotations

from collections import defaultdict
from datetime import date, datetime, timezone

DAY_MS = 86_400_000


def fold_balances(entries: list) -> dict:
    """(account_id, currency) -> minor units, by summing every posting."""
    totals: dict = defaultdict(int)
    for entry in entries:
        for p in entry.postings:
            totals[(p.account_id, p.currency)] += p.amount_minor
    return dict(totals)


def _date_start_ms(day: str) -> int:
    dt = datetime.combine(date.fromisoformat(day), datetime.min.time(), tzinfo=timezone.utc)
    return int(dt.timestamp() * 1000)


def history_filter(entries: list, account_id: str, frm: str, to: str, now_ms: int,
                   retention_days: int = 90) -> list:
    """Linear-scan history oracle: window intersect retention horizon, newest first."""
    lo = max(_date_start_ms(frm), now_ms - retention_days * DAY_MS)
    hi = min(_date_start_ms(to) + DAY_MS - 1, now_ms)
    hits = []
    for entry in entries:
        touches = any(p.account_id == account_id for p in entry.postings)
        if touches and lo <= entry.posted_ms <= hi:
            hits.append(entry)
    hits.sort(key=lambda e: (e.posted_ms, e.entry_id), reverse=True)
    return hits


def simulate_value_date(balances: dict, items: list, business_date: str) -> tuple[list, list, dict]:
    """Sequential scheduler oracle.

    balances: (account_id, currency) -> minor units (clearing included).
    items: dicts with id, effective_date, source, credit_to, amount_minor,
    currency, plus source_kind/credit_limit for credit cards.
    Returns (executed_ids, failed_ids, final_balances).
    """
    balances = dict(balances)
    due = [i for i in items if i["effective_date"] <= business_date]
    due.sort(key=lambda i: (i["effective_date"], i["id"]))
    executed, failed = [], []
    for item in due:
        src = (item["source"], item["currency"])
        dst = (item["credit_to"], item["currency"])
        after_src = balances.get(src, 0) - item["amount_minor"]
        after_dst = balances.get(dst, 0) + item["amount_minor"]
        ok = after_src >= 0
        if item.get("credit_to_kind") == "credit_card":
            ok = ok and after_dst <= 0  # raw card balance may not cross zero
        if ok:
            balances[src] = after_src
            balances[dst] = after_dst
            executed.append(item["id"])
        else:
            failed.append(item["id"])
    return executed, failed, balances


def top_ten(payments: list) -> list:
    """Count-and-sort oracle over executed payments."""
    counts: dict = defaultdict(int)
    for p in payments:
        if p.status == "executed":
            counts[p.corporation] += 1
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return [name for name, _ in ranked[:10]]
