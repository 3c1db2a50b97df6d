#!/usr/bin/env python3
"""Regenerates the recorded-transport fixtures for the forge-client tests.

forge-replay/          -- a healthy 2-fork repository, forks paginated
forge-replay-limited/  -- same, but the fork listing rate-limits once first
"""

import copy
import json
import os

HERE = os.path.dirname(os.path.abspath(__file__))
API = "https://api.test"

S0 = "a" + "0" * 39
S1 = "b" + "0" * 39
S2 = "c" + "0" * 39


def repo(rid, full, login, created):
    return {"id": rid, "full_name": full, "owner": {"login": login}, "created_at": created}


FORK1 = repo(501, "alice/widget", "alice", "2021-01-05T00:00:00Z")
FORK2 = repo(502, "bert/widget", "bert", "2021-01-06T00:00:00Z")


def commit_detail(sha, login, date, message, files, parents):
    return {
        "sha": sha,
        "author": {"login": login},
        "commit": {"author": {"date": date}, "message": message},
        "parents": [{"sha": p} for p in parents],
        "files": [{"filename": f, "additions": a, "deletions": d} for (f, a, d) in files],
    }


RESPONSES = [
    {"url": f"{API}/repos/octo/widget",
     "body_json": {"id": 500, "full_name": "octo/widget",
                   "created_at": "2021-01-01T00:00:00Z"}},

    # fork listing paginated over two pages via the Link header
    {"url": f"{API}/repos/octo/widget/forks?per_page=100",
     "headers": {"Link": f"<{API}/repos/octo/widget/forks?per_page=100&page=2>; rel=\"next\""},
     "body_json": [FORK1]},
    {"url": f"{API}/repos/octo/widget/forks?per_page=100&page=2", "body_json": [FORK2]},
    {"url": f"{API}/repos/alice/widget/forks?per_page=100", "body_json": []},
    {"url": f"{API}/repos/bert/widget/forks?per_page=100", "body_json": []},

    # commits: listing + per-commit detail
    {"url": f"{API}/repos/octo/widget/commits?per_page=100", "body_json": [{"sha": S0}]},
    {"url": f"{API}/repos/octo/widget/commits/{S0}",
     "body_json": commit_detail(S0, "octocat", "2021-01-01T00:00:00Z", "init",
                                [("README.md", 5, 0)], [])},
    {"url": f"{API}/repos/alice/widget/commits?per_page=100", "body_json": [{"sha": S1}]},
    {"url": f"{API}/repos/alice/widget/commits/{S1}",
     "body_json": commit_detail(S1, "alice", "2021-02-03T00:00:00Z", "improve a",
                                [("a.txt", 2, 1)], [S0])},
    {"url": f"{API}/repos/bert/widget/commits?per_page=100", "body_json": [{"sha": S2}]},
    {"url": f"{API}/repos/bert/widget/commits/{S2}",
     "body_json": commit_detail(S2, "bert", "2021-02-10T00:00:00Z", "improve b",
                                [("b.txt", 3, 0)], [S0])},

    # pulls: listing + commits + files + last 3 comments (newest first)
    {"url": f"{API}/repos/octo/widget/pulls?state=all&per_page=100&sort=created&direction=asc",
     "body_json": [{
         "number": 7, "user": {"login": "alice"},
         "created_at": "2021-02-05T00:00:00Z", "closed_at": "2021-02-07T00:00:00Z",
         "merged_at": "2021-02-07T00:00:00Z",
         "head": {"repo": FORK1}, "base": {"repo": {"id": 500}},
     }]},
    {"url": f"{API}/repos/octo/widget/pulls/7/commits", "body_json": [{"sha": S1}]},
    {"url": f"{API}/repos/octo/widget/pulls/7/files",
     "body_json": [{"filename": "a.txt", "additions": 2, "deletions": 1}]},
    {"url": f"{API}/repos/octo/widget/issues/7/comments?per_page=3&sort=created&direction=desc",
     "body_json": [{"body": "thanks, merged"}, {"body": "looks good"}]},

    # issues: one real issue plus a PR-shaped entry that must be skipped
    {"url": f"{API}/repos/octo/widget/issues?state=all&per_page=100&direction=asc",
     "body_json": [
         {"number": 1, "title": "Error in parser", "labels": [{"name": "bug"}],
          "created_at": "2021-02-01T00:00:00Z", "user": {"login": "carol"}},
         {"number": 7, "title": "improve a", "labels": [], "pull_request": {},
          "created_at": "2021-02-05T00:00:00Z", "user": {"login": "alice"}},
     ]},

    # events: privileged close / merge, plus a self-close that is not privileged
    {"url": f"{API}/repos/octo/widget/issues/events?per_page=100",
     "body_json": [
         {"event": "closed", "actor": {"login": "octocat"},
          "created_at": "2021-02-02T00:00:00Z",
          "issue": {"number": 1, "user": {"login": "carol"}}},
         {"event": "merged", "actor": {"login": "octocat"},
          "created_at": "2021-02-07T00:00:00Z",
          "issue": {"number": 7, "user": {"login": "alice"}, "pull_request": {}}},
         {"event": "closed", "actor": {"login": "carol"},
          "created_at": "2021-02-08T00:00:00Z",
          "issue": {"number": 1, "user": {"login": "carol"}}},
         {"event": "labeled", "actor": {"login": "octocat"},
          "created_at": "2021-02-09T00:00:00Z",
          "issue": {"number": 1, "user": {"login": "carol"}}},
     ]},

    {"url": f"{API}/repos/octo/widget/stargazers?per_page=100",
     "body_json": [{"starred_at": "2021-01-02T00:00:00Z", "user": {"login": "dave"}},
                   {"starred_at": "2021-02-11T00:00:00Z", "user": {"login": "erin"}}]},
]


def write(dirname, responses):
    out = os.path.join(HERE, dirname)
    os.makedirs(out, exist_ok=True)
    with open(os.path.join(out, "responses.json"), "w") as f:
        json.dump(responses, f, indent=1, sort_keys=True)
        f.write("\n")
    print(f"wrote {out}/responses.json ({len(responses)} entries)")


def main():
    write("forge-replay", RESPONSES)

    # same recording, but the first hit on the fork listing is rate-limited;
    # the retry (same URL) then succeeds
    limited = copy.deepcopy(RESPONSES)
    limited.insert(1, {
        "url": f"{API}/repos/octo/widget/forks?per_page=100",
        "status": 403,
        "headers": {"retry-after": "42", "x-ratelimit-remaining": "0"},
        "body_json": {"message": "API rate limit exceeded"},
    })
    write("forge-replay-limited", limited)


if __name__ == "__main__":
    main()
