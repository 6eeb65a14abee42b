"""Repository harvesting against a GitHub-style code search API.

Discovery goes through the code search endpoint (``/search/code``) so that
repositories are selected by what their files contain, not by metadata.
Every response the client consumes is plain JSON over HTTP, which keeps the
whole module testable against a local stub server; no test needs live
credentials.

Wire format expected from the API:

* ``GET /search/code?q=...&per_page=N&page=K`` ->
  ``{"total_count": int, "items": [{"repository": {"full_name", "fork",
  "stargazers_count", "size", "private"}}]}``
* ``GET /repos/{full_name}/git/trees/HEAD?recursive=1`` ->
  ``{"tree": [{"path", "type", "sha"}]}``
* ``GET /repos/{full_name}/contents/{path}`` ->
  ``{"content": base64, "encoding": "base64"}``

Rate limiting follows the usual header convention: a 403/429 with
``X-RateLimit-Remaining: 0`` (or a ``Retry-After``) makes the client sleep
until the advertised reset and retry, up to a bounded number of attempts.

The harvest manifest is a line-delimited JSON file, append-only, which makes
re-runs cheap: a file whose recorded git blob sha still matches is never
downloaded again.
"""

from __future__ import annotations

import base64
import hashlib
import json
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable

import requests

DEFAULT_BASE_URL = "https://api.github.com"
TOKEN_ENV_VAR = "TFSUSTAIN_GITHUB_TOKEN"

# Search tokens per provider; the query is configuration, not logic.
PROVIDER_QUERIES = {
    "aws": "aws_instance",
    "azure": "azurerm_",
    "gcp": "google_compute_",
}


class HarvestError(Exception):
    """Base class for harvest failures."""


class AuthError(HarvestError):
    """Credentials rejected by the API."""


class RateLimitError(HarvestError):
    """Rate budget exhausted after the allowed retries."""


class NetworkError(HarvestError):
    """Transport failure that persisted across retries."""


class RepoGoneError(HarvestError):
    """Repository vanished or became inaccessible mid-harvest."""


@dataclass(frozen=True)
class RepoRecord:
    full_name: str
    stars: int
    is_fork: bool
    size_kb: int
    visibility: str  # "public" | "other"
    provider_tag: str
    retrieved_at: str

    def to_json_dict(self) -> dict:
        return {
            "full_name": self.full_name,
            "stars": self.stars,
            "is_fork": self.is_fork,
            "size_kb": self.size_kb,
            "visibility": self.visibility,
            "provider_tag": self.provider_tag,
            "retrieved_at": self.retrieved_at,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "RepoRecord":
        return cls(**data)


@dataclass(frozen=True)
class FilterCriteria:
    """Automatic repository filters; defaults match the published protocol."""

    min_stars: int = 2
    exclude_forks: bool = True
    min_size_kb_exclusive: int = 0
    require_public: bool = True
    # The content filter (tutorials, assignments, deliberately insecure
    # repos) needs human judgment; it only flags, never decides.
    manual_review_content: bool = True

    def to_json_dict(self) -> dict:
        return {
            "min_stars": self.min_stars,
            "exclude_forks": self.exclude_forks,
            "min_size_kb_exclusive": self.min_size_kb_exclusive,
            "require_public": self.require_public,
            "manual_review_content": self.manual_review_content,
        }


def apply_filters(
    records: list[RepoRecord], criteria: FilterCriteria | None = None
) -> tuple[list[RepoRecord], list[tuple[RepoRecord, str]]]:
    """Split records into kept and rejected-with-reason.

    A rejected record carries the first criterion it failed, checked in the
    order size, fork, stars, visibility.
    """
    if criteria is None:
        criteria = FilterCriteria()
    kept: list[RepoRecord] = []
    rejected: list[tuple[RepoRecord, str]] = []
    for record in records:
        if record.size_kb <= criteria.min_size_kb_exclusive:
            rejected.append((record, "size"))
        elif criteria.exclude_forks and record.is_fork:
            rejected.append((record, "fork"))
        elif record.stars < criteria.min_stars:
            rejected.append((record, "min_stars"))
        elif criteria.require_public and record.visibility != "public":
            rejected.append((record, "not_public"))
        else:
            kept.append(record)
    return kept, rejected


@dataclass(frozen=True)
class FileEntry:
    repo: str
    path: str
    git_sha: str
    sha256: str
    downloaded: bool


class CodeSearchClient:
    """Minimal client for the search/tree/contents endpoints."""

    def __init__(
        self,
        base_url: str = DEFAULT_BASE_URL,
        token: str | None = None,
        session: requests.Session | None = None,
        sleeper: Callable[[float], None] = time.sleep,
        clock: Callable[[], float] = time.time,
        max_retries: int = 5,
        per_page: int = 100,
    ) -> None:
        self.base_url = base_url.rstrip("/")
        self.token = token
        self.session = session or requests.Session()
        self.sleeper = sleeper
        self.clock = clock
        self.max_retries = max_retries
        self.per_page = per_page
        self.requests_made = 0

    # -- transport ---------------------------------------------------------

    def _get(self, path: str, params: dict | None = None) -> dict:
        headers = {"Accept": "application/vnd.github+json"}
        if self.token:
            headers["Authorization"] = f"Bearer {self.token}"
        url = f"{self.base_url}{path}"
        attempts = 0
        while True:
            attempts += 1
            try:
                resp = self.session.get(url, params=params, headers=headers, timeout=30)
            except requests.RequestException as err:
                if attempts > self.max_retries:
                    raise NetworkError(f"request to {path} kept failing: {err}") from err
                self.sleeper(min(2.0 ** attempts, 30.0))
                continue
            self.requests_made += 1
            if resp.status_code == 200:
                return resp.json()
            if resp.status_code == 401:
                raise AuthError("credentials rejected (401)")
            if resp.status_code == 404:
                raise RepoGoneError(f"{path} returned 404")
            if resp.status_code in (403, 429):
                wait = self._backoff_seconds(resp)
                if wait is None:
                    raise AuthError(f"{path} forbidden (403) without rate headers")
                if attempts > self.max_retries:
                    raise RateLimitError(
                        f"rate budget exhausted after {self.max_retries} retries"
                    )
                self.sleeper(wait)
                continue
            if resp.status_code >= 500:
                if attempts > self.max_retries:
                    raise NetworkError(f"{path} kept failing ({resp.status_code})")
                self.sleeper(min(2.0 ** attempts, 30.0))
                continue
            raise NetworkError(f"{path} returned unexpected {resp.status_code}")

    def _backoff_seconds(self, resp: requests.Response) -> float | None:
        retry_after = resp.headers.get("Retry-After")
        if retry_after is not None:
            try:
                return max(0.0, float(retry_after))
            except ValueError:
                return None
        if resp.headers.get("X-RateLimit-Remaining") == "0":
            reset = resp.headers.get("X-RateLimit-Reset")
            if reset is not None:
                try:
                    return max(0.0, float(reset) - self.clock()) + 1.0
                except ValueError:
                    return None
        return None

    # -- operations ----------------------------------------------------

    def search_repos(self, provider_tag: str, query: str) -> list[RepoRecord]:
        """All repositories whose files match the query, fully paginated.

        Results are deduplicated by full name; a page that cannot be
        retrieved raises rather than silently truncating the listing.
        """
        records: dict[str, RepoRecord] = {}
        page = 1
        total: int | None = None
        seen_items = 0
        while True:
            data = self._get(
                "/search/code",
                {"q": query, "per_page": self.per_page, "page": page},
            )
            items = data.get("items", [])
            if total is None:
                total = int(data.get("total_count", len(items)))
            seen_items += len(items)
            for item in items:
                repo = item.get("repository", {})
                full_name = repo.get("full_name")
                if not full_name or full_name in records:
                    continue
                records[full_name] = RepoRecord(
                    full_name=full_name,
                    stars=int(repo.get("stargazers_count", 0)),
                    is_fork=bool(repo.get("fork", False)),
                    size_kb=int(repo.get("size", 0)),
                    visibility="public" if not repo.get("private", False) else "other",
                    provider_tag=provider_tag,
                    retrieved_at=datetime.now(timezone.utc).isoformat(),
                )
            if not items or seen_items >= total:
                break
            page += 1
        return list(records.values())

    def fetch_tf_files(
        self,
        record: RepoRecord,
        dest: str | Path,
        manifest: "HarvestManifest | None" = None,
    ) -> list[FileEntry]:
        """Materialize every .tf file of a repository under dest.

        Idempotent: when the manifest already records a file with the same
        git blob sha and the bytes on disk still hash to the recorded
        digest, no content request is made.
        """
        dest = Path(dest)
        tree = self._get(f"/repos/{record.full_name}/git/trees/HEAD", {"recursive": "1"})
        entries: list[FileEntry] = []
        for node in tree.get("tree", []):
            if node.get("type") != "blob" or not node.get("path", "").endswith(".tf"):
                continue
            rel = node["path"]
            git_sha = node.get("sha", "")
            target = dest / record.full_name / rel
            known = manifest.file_entry(record.full_name, rel) if manifest else None
            if known is not None and known.git_sha == git_sha and target.exists():
                on_disk = hashlib.sha256(target.read_bytes()).hexdigest()
                if on_disk == known.sha256:
                    entries.append(
                        FileEntry(record.full_name, rel, git_sha, known.sha256, False)
                    )
                    continue
            blob = self._get(f"/repos/{record.full_name}/contents/{rel}")
            content = base64.b64decode(blob.get("content", ""))
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_bytes(content)
            digest = hashlib.sha256(content).hexdigest()
            entry = FileEntry(record.full_name, rel, git_sha, digest, True)
            entries.append(entry)
            if manifest is not None:
                manifest.record_file(entry)
        return entries


class HarvestManifest:
    """Append-only, replayable record of harvest decisions and file digests.

    Stored as line-delimited JSON: one ``criteria`` line, then ``repo``
    decision lines and ``file`` digest lines in arrival order.
    """

    def __init__(self, path: str | Path) -> None:
        self.path = Path(path)
        self.criteria: FilterCriteria | None = None
        self._repos: dict[str, dict] = {}
        self._files: dict[tuple[str, str], FileEntry] = {}
        if self.path.exists():
            self._load()

    def _load(self) -> None:
        with self.path.open(encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                data = json.loads(line)
                kind = data.get("kind")
                if kind == "criteria":
                    self.criteria = FilterCriteria(
                        **{k: v for k, v in data.items() if k != "kind"}
                    )
                elif kind == "repo":
                    self._repos[data["record"]["full_name"]] = data
                elif kind == "file":
                    entry = FileEntry(
                        data["repo"],
                        data["path"],
                        data["git_sha"],
                        data["sha256"],
                        downloaded=False,
                    )
                    self._files[(entry.repo, entry.path)] = entry

    def _append(self, data: dict) -> None:
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with self.path.open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(data, sort_keys=True) + "\n")

    def record_criteria(self, criteria: FilterCriteria) -> None:
        if self.criteria is None:
            self.criteria = criteria
            self._append({"kind": "criteria", **criteria.to_json_dict()})

    def record_repo(
        self,
        record: RepoRecord,
        decision: str,
        reason: str,
        manual_review: bool = False,
    ) -> None:
        data = {
            "kind": "repo",
            "record": record.to_json_dict(),
            "decision": decision,
            "reason": reason,
            "manual_review": manual_review,
        }
        self._repos[record.full_name] = data
        self._append(data)

    def record_file(self, entry: FileEntry) -> None:
        self._files[(entry.repo, entry.path)] = entry
        self._append(
            {
                "kind": "file",
                "repo": entry.repo,
                "path": entry.path,
                "git_sha": entry.git_sha,
                "sha256": entry.sha256,
            }
        )

    def file_entry(self, repo: str, path: str) -> FileEntry | None:
        return self._files.get((repo, path))

    def repo_decision(self, full_name: str) -> dict | None:
        return self._repos.get(full_name)

    def manual_review_queue(self) -> list[str]:
        return sorted(
            name
            for name, data in self._repos.items()
            if data.get("manual_review") and data.get("decision") == "kept"
        )

    def totals_per_provider(self) -> dict[str, dict[str, int]]:
        totals: dict[str, dict[str, int]] = {}
        for data in self._repos.values():
            provider = data["record"]["provider_tag"]
            bucket = totals.setdefault(provider, {"kept": 0, "rejected": 0, "skipped": 0})
            decision = data["decision"]
            bucket[decision] = bucket.get(decision, 0) + 1
        return totals


@dataclass
class HarvestSummary:
    kept: int = 0
    rejected: int = 0
    skipped: int = 0
    files_fetched: int = 0
    files_unchanged: int = 0
    manual_review: list[str] = field(default_factory=list)


def harvest_provider(
    client: CodeSearchClient,
    provider_tag: str,
    dest: str | Path,
    manifest: HarvestManifest,
    criteria: FilterCriteria | None = None,
    query: str | None = None,
    dry_run: bool = False,
) -> HarvestSummary:
    """Search, filter, and fetch one provider's repositories.

    A repository that vanishes mid-batch is recorded as skipped ("gone");
    the batch always completes.
    """
    if criteria is None:
        criteria = FilterCriteria()
    if query is None:
        query = PROVIDER_QUERIES.get(provider_tag, provider_tag)
    manifest.record_criteria(criteria)

    summary = HarvestSummary()
    records = client.search_repos(provider_tag, query)
    kept, rejected = apply_filters(records, criteria)
    for record, reason in rejected:
        manifest.record_repo(record, "rejected", reason)
        summary.rejected += 1
    for record in kept:
        if dry_run:
            manifest.record_repo(
                record, "kept", "dry-run", manual_review=criteria.manual_review_content
            )
            summary.kept += 1
            continue
        try:
            entries = client.fetch_tf_files(record, dest, manifest)
        except RepoGoneError:
            manifest.record_repo(record, "skipped", "gone")
            summary.skipped += 1
            continue
        manifest.record_repo(
            record, "kept", "passed filters", manual_review=criteria.manual_review_content
        )
        summary.kept += 1
        summary.files_fetched += sum(1 for e in entries if e.downloaded)
        summary.files_unchanged += sum(1 for e in entries if not e.downloaded)
    summary.manual_review = manifest.manual_review_queue()
    return summary


def criteria_from_file(path: str | Path) -> FilterCriteria:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    allowed = set(FilterCriteria().to_json_dict())
    unknown = set(data) - allowed
    if unknown:
        raise HarvestError(f"unknown criteria key(s): {', '.join(sorted(unknown))}")
    return FilterCriteria(**data)
