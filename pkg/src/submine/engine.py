"""The worker runtime.

Each worker owns a partition of the vertex table, a disk-spilling task
queue, and a bounded cache of remote vertices, and repeats three-step
rounds until its queue drains:

1. task fetching -- pop tasks from the queue into the round batch until
   the batch buffer is full or the cache cannot reserve a task's pull
   set.  Reservation is all-or-nothing per task: the task that does not
   fit waits for the next round (or, if it alone exceeds the whole cache,
   runs as a singleton batch inside a cache overflow episode).
2. vertex pulling -- one request per destination worker carrying the
   deduplicated id list of everything the batch needs but does not have;
   responses are decoded into the cache.  Within a round no vertex id is
   ever requested twice.
3. task computing -- each task's compute runs repeatedly (its frontier is
   the vertices it pulled in the previous iteration, in pull-call order)
   until it either finishes or pulls a vertex that is neither local nor
   cached; in that case it is re-keyed by its new pull set and requeued.
   New tasks spawned by compute stay on this worker.

Workers exchange vertices only: a per-worker responder thread answers
pull requests from the worker's local table (optionally through the
app's respond hook, which may send a pruned copy), so computation never
blocks remote requesters.  Aggregation is per-worker with an optional
periodic sync that publishes local values and a merged global snapshot;
a final merge always runs at job end.  There is no global round barrier;
a job ends when every worker's queue and buffers are empty, which the
coordinating thread observes by joining the compute threads.
"""

import os
import shutil
import tempfile
import threading
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

from .graph import (
    Graph,
    Subgraph,
    check_undirected,
    partition_graph,
    partition_owner,
    read_graph,
)
from .minhash import TaskKey, derive_seeds, minhash_signature
from .serialize import TaskWire, decode_task, encode_task, encode_vertex, vertex_from_bytes
from .store import VertexCache, VertexStore
from .taskqueue import TaskRecord, make_queue
from .transport import SHUTDOWN, InProcTransport, PullResponse


class EngineError(RuntimeError):
    pass


class ProtocolError(EngineError):
    pass


class ComputeError(EngineError):
    """An app hook raised; message carries worker/seed/iteration provenance."""


class JobAborted(EngineError):
    """Secondary failure after another worker already stopped the job."""


@dataclass
class RunConfig:
    input_path: Optional[str] = None
    workers: int = 8
    buffer_capacity: int = 1000
    file_capacity: int = 100
    cache_capacity: int = 1_000_000
    queue_kind: str = "lsh"
    ell: int = 4
    run_seed: int = 1
    sync_every_rounds: Optional[int] = 1
    sync_every_ms: Optional[float] = None
    workdir: Optional[str] = None
    keep_workdir: bool = False
    collect_trace: bool = False
    validate_graph: bool = True

    def __post_init__(self):
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if self.queue_kind not in ("stream", "lsh"):
            raise ValueError(f"unknown queue kind {self.queue_kind!r}")


@dataclass
class AggregatorSpec:
    """Commutative, associative merge with an identity.

    Values flow task -> worker-local -> global; periodic sync republishes
    worker locals, so mid-run snapshots are only meaningful for monotone
    merges (max-style).  The final merge at job end is always exact.
    """

    zero: Callable
    merge: Callable


class SharedAggregator:
    def __init__(self, spec: AggregatorSpec, num_workers):
        self.spec = spec
        self._slots = [spec.zero() for _ in range(num_workers)]
        self._lock = threading.Lock()
        self._snapshot = spec.zero()

    def publish(self, wid, value):
        with self._lock:
            self._slots[wid] = value
            snap = self.spec.zero()
            for s in self._slots:
                snap = self.spec.merge(snap, s)
            self._snapshot = snap

    def snapshot(self):
        return self._snapshot

    def final(self):
        with self._lock:
            out = self.spec.zero()
            for s in self._slots:
                out = self.spec.merge(out, s)
            return out


@dataclass
class AppSpec:
    """A mining application: seeding, compute, and serialization hooks."""

    name: str
    seed: Callable                 # (Vertex) -> iterable of Task
    compute: Callable              # (Task, frontier: list[Vertex]) -> bool
    encode_context: Callable       # (ctx) -> bytes
    decode_context: Callable       # (bytes) -> ctx
    respond: Optional[Callable] = None   # (Vertex) -> Vertex | None
    aggregator: Optional[AggregatorSpec] = None
    needs_undirected: bool = True


class Task:
    """One unit of mining work, anchored at the vertex that seeded it.

    Inside compute, `frontier` holds the vertices pulled in the previous
    iteration in pull-call order; frontier references are only valid for
    the duration of the call (copy what must be kept into the task's own
    subgraph).  pull() requests a vertex for the next iteration (local
    ids resolve without messaging); add_task() spawns a child task that
    inherits this task's seed attribution unless given its own.
    """

    __slots__ = (
        "seed_id", "context", "subgraph", "requested", "pending",
        "iteration", "_worker", "_pull_order", "_pull_seen", "_children",
    )

    def __init__(self, seed_id, context=None, subgraph=None, pulls=()):
        self.seed_id = seed_id
        self.context = context
        self.subgraph = subgraph if subgraph is not None else Subgraph()
        self.requested = tuple(pulls)
        self.pending = frozenset()
        self.iteration = 0
        self._worker = None
        self._pull_order = None
        self._pull_seen = None
        self._children = []

    def pull(self, vid):
        if vid not in self._pull_seen:
            self._pull_seen.add(vid)
            self._pull_order.append(vid)

    def add_task(self, child):
        self._children.append(child)

    def emit(self, line):
        self._worker._emit(self.seed_id, line)

    def aggregate(self, value):
        self._worker._aggregate(value)

    def best(self):
        """Merged view of the worker-local value and the last published
        global snapshot (the pruning bound for branch-and-bound apps)."""
        return self._worker._best()

    def _begin(self, worker):
        self._worker = worker
        self._pull_order = []
        self._pull_seen = set()
        self._children = []

    def _end(self):
        self._worker = None


_METRIC_KEYS = (
    "rounds", "tasks_seeded", "tasks_spawned", "tasks_completed",
    "tasks_requeued", "compute_calls", "requests_sent", "responses_served",
    "vertices_requested", "vertices_served", "overflow_episodes",
)


class _RespStats:
    __slots__ = ("served", "vertices")

    def __init__(self):
        self.served = 0
        self.vertices = 0


class Worker:
    def __init__(self, wid, cfg, app, table, transport, agg, stop, seeds,
                 workdir, storage_factory=None):
        self.wid = wid
        self.cfg = cfg
        self.app = app
        self.table = table
        self.transport = transport
        self.agg = agg
        self.stop = stop
        self.trace = [] if cfg.collect_trace else None
        trace_cb = self.trace.append if cfg.collect_trace else None
        self.cache = VertexCache(
            cfg.cache_capacity, is_local=table.__contains__, trace=trace_cb
        )
        self.store = VertexStore(table, self.cache)
        qdir = os.path.join(workdir, f"w{wid}", "queue")
        storage = storage_factory(qdir) if storage_factory else None
        self.queue = make_queue(
            cfg.queue_kind, qdir, file_capacity=cfg.file_capacity,
            buffer_capacity=cfg.buffer_capacity, ell=cfg.ell, storage=storage,
        )
        self.minhash_seeds = seeds
        self.local_value = app.aggregator.zero() if app.aggregator else None
        self.emitted = []
        self.resp_stats = _RespStats()
        self.round_no = 0
        self.metrics = {k: 0 for k in _METRIC_KEYS}
        self._seq = 0
        self._out = []
        self._carry = None
        self._last_sync = time.monotonic()
        self.err = None

    # -- task plumbing -----------------------------------------------------

    def _normalize(self, task):
        seen = set()
        reqs = []
        for vid in task.requested:
            if vid not in seen:
                seen.add(vid)
                reqs.append(vid)
        task.requested = tuple(reqs)
        task.pending = frozenset(v for v in reqs if v not in self.table)

    def _key_for(self, task) -> TaskKey:
        key = TaskKey(
            minhash_signature(sorted(task.pending), self.minhash_seeds),
            self._seq,
        )
        self._seq += 1
        return key

    def _encode(self, task) -> bytes:
        wire = TaskWire(
            task.seed_id, task.iteration, task.requested, task.pending,
            self.app.encode_context(task.context), task.subgraph,
        )
        return encode_task(wire)

    def _decode(self, rec: TaskRecord) -> Task:
        w = decode_task(rec.payload)
        t = Task(w.seed_id, self.app.decode_context(w.context), w.subgraph)
        t.requested = w.requested
        t.pending = w.pending
        t.iteration = w.iteration
        return t

    def _enqueue_out(self, task):
        self._out.append(task)
        if len(self._out) >= self.cfg.buffer_capacity:
            self._flush_out()

    def _flush_out(self):
        for t in self._out:
            self.queue.enqueue(TaskRecord(self._key_for(t), self._encode(t)))
        self._out = []

    def _emit(self, seed_id, line):
        self.emitted.append((seed_id, line))

    def _aggregate(self, value):
        if self.app.aggregator is None:
            raise EngineError(f"app {self.app.name!r} has no aggregator")
        self.local_value = self.app.aggregator.merge(self.local_value, value)

    def _best(self):
        spec = self.app.aggregator
        if spec is None:
            return None
        if self.agg is None:
            return self.local_value
        return spec.merge(self.local_value, self.agg.snapshot())

    # -- the round loop ----------------------------------------------------

    def seed_all(self):
        records = []
        for vid in sorted(self.table):
            v = self.table[vid]
            try:
                tasks = self.app.seed(v) or ()
            except Exception as e:
                raise ComputeError(
                    f"app {self.app.name!r} seed failed on vertex {vid} "
                    f"(worker {self.wid}): {e}"
                ) from e
            for t in tasks:
                self._normalize(t)
                self.metrics["tasks_seeded"] += 1
                records.append(TaskRecord(self._key_for(t), self._encode(t)))
        self.queue.seed_bulk(records)
        if self.trace is not None:
            self.trace.append(("seeded", len(records)))

    def run(self):
        try:
            self.seed_all()
            while not self.stop.is_set():
                if not self.run_round():
                    break
            if self.app.aggregator and self.agg is not None:
                self.agg.publish(self.wid, self.local_value)
        except BaseException as e:
            self.err = e
            self.stop.set()

    def run_round(self):
        cache = self.cache
        batch = []
        to_request = []
        requested_set = set()
        overflow = False

        # Step 1: fetch tasks while the batch buffer and the cache have room.
        while len(batch) < self.cfg.buffer_capacity:
            if self._carry is not None:
                task, self._carry = self._carry, None
            else:
                rec = self.queue.fetch()
                if rec is None:
                    break
                task = self._decode(rec)
            need = task.pending
            if need:
                got = cache.reserve(need)
                if not got:
                    if batch:
                        self._carry = task
                        break
                    # A pull set bigger than the whole cache: run this one
                    # task alone inside an overflow episode.
                    cache.enter_overflow(len(need))
                    self.metrics["overflow_episodes"] += 1
                    if not cache.reserve(need):
                        raise EngineError(
                            f"reservation failed inside overflow episode "
                            f"(worker {self.wid}, seed {task.seed_id})"
                        )
                    overflow = True
            batch.append((task, need))
            for vid in sorted(need):
                if vid not in requested_set and not cache.has_data(vid):
                    requested_set.add(vid)
                    to_request.append(vid)
            if overflow:
                break

        if not batch:
            return False

        self.round_no += 1
        self.metrics["rounds"] += 1
        if self.trace is not None:
            self.trace.append(("round", self.round_no, len(batch)))

        # Step 2: one deduplicated pull request per destination worker.
        by_owner = {}
        for vid in to_request:
            by_owner.setdefault(partition_owner(vid, self.cfg.workers), []).append(vid)
        outstanding = 0
        for dst in sorted(by_owner):
            ids = sorted(by_owner[dst])
            self.transport.send_request(self.wid, dst, ids)
            outstanding += 1
            self.metrics["requests_sent"] += 1
            self.metrics["vertices_requested"] += len(ids)
            if self.trace is not None:
                self.trace.append(("request", self.wid, self.round_no, dst, tuple(ids)))
        while outstanding:
            resp = self.transport.next_response(self.wid)
            if resp is None:
                if self.stop.is_set():
                    raise JobAborted(
                        f"worker {self.wid} aborted awaiting pull responses"
                    )
                continue
            for blob in resp.blobs:
                cache.insert_pulled(vertex_from_bytes(blob))
            outstanding -= 1
            if self.trace is not None:
                self.trace.append(("response", self.wid, resp.src, len(resp.blobs)))

        # Step 3: compute every batched task to completion or requeue.
        for task, _need in batch:
            self._run_task(task)

        self._flush_out()
        for _task, need in batch:
            if need:
                cache.unpin_batch(need)
        if overflow:
            cache.exit_overflow()
        self._maybe_sync()
        return True

    def _run_task(self, task):
        while True:
            frontier = [self.store.resolve(vid) for vid in task.requested]
            task._begin(self)
            try:
                cont = self.app.compute(task, frontier)
            except EngineError:
                task._end()
                raise
            except Exception as e:
                task._end()
                raise ComputeError(
                    f"app {self.app.name!r} compute failed: worker {self.wid}, "
                    f"seed {task.seed_id}, iteration {task.iteration}: {e}"
                ) from e
            children = task._children
            task._children = []
            task._end()
            task.iteration += 1
            self.metrics["compute_calls"] += 1
            for child in children:
                self._normalize(child)
                self.metrics["tasks_spawned"] += 1
                self._enqueue_out(child)
            if not cont:
                self.metrics["tasks_completed"] += 1
                if self.trace is not None:
                    self.trace.append(("complete", task.seed_id, task.iteration))
                return
            task.requested = tuple(task._pull_order)
            nonlocal_ids = frozenset(
                v for v in task.requested if v not in self.table
            )
            missing = [v for v in nonlocal_ids if not self.cache.has_data(v)]
            if missing:
                # Re-key by the new pull set and hand back to the queue.
                task.pending = nonlocal_ids
                self.metrics["tasks_requeued"] += 1
                if self.trace is not None:
                    self.trace.append(
                        ("requeue", task.seed_id, task.iteration, len(nonlocal_ids))
                    )
                self._enqueue_out(task)
                return
            # Everything already resident: keep iterating within the round.
            for vid in nonlocal_ids:
                self.cache.get(vid)  # recency + hit accounting
            task.pending = frozenset()

    def _maybe_sync(self):
        if self.app.aggregator is None or self.agg is None:
            return
        due = False
        if self.cfg.sync_every_rounds:
            due = self.round_no % self.cfg.sync_every_rounds == 0
        if not due and self.cfg.sync_every_ms is not None:
            now = time.monotonic()
            if (now - self._last_sync) * 1000.0 >= self.cfg.sync_every_ms:
                due = True
        if due:
            self.agg.publish(self.wid, self.local_value)
            self._last_sync = time.monotonic()
            if self.trace is not None:
                self.trace.append(("sync", self.round_no))

    # -- end-of-job checks ---------------------------------------------------

    def assert_drained(self):
        if len(self.queue) != 0:
            raise EngineError(f"worker {self.wid} queue not drained")
        if self._out or self._carry is not None:
            raise EngineError(f"worker {self.wid} buffers not drained")
        self.cache.assert_quiescent()

    def collect_metrics(self):
        m = dict(self.metrics)
        m["responses_served"] = self.resp_stats.served
        m["vertices_served"] = self.resp_stats.vertices
        m.update(self.cache.metrics())
        m.update(self.queue.metrics())
        return m


def _responder_loop(wid, table, app, transport, stop, fail, stats):
    """Serve pull requests from this worker's local table until shutdown.

    Runs on its own thread so remote workers are never starved by a long
    local compute.  Touches only the read-only table and the app respond
    hook.
    """
    while True:
        req = transport.next_request(wid)
        if req is None:
            continue
        if req is SHUTDOWN:
            return
        try:
            blobs = []
            for vid in req.ids:
                v = table.get(vid)
                if v is None:
                    raise ProtocolError(
                        f"worker {req.src} requested vertex {vid}, "
                        f"which worker {wid} does not own"
                    )
                if app.respond is not None:
                    pruned = app.respond(v)
                    if pruned is not None:
                        v = pruned
                blobs.append(encode_vertex(v))
            transport.send_response(req.src, PullResponse(wid, blobs))
            stats.served += 1
            stats.vertices += len(blobs)
        except Exception as e:
            fail(e)
            return


@dataclass
class JobResult:
    aggregate: object
    emitted: list          # (worker, seed_id, line)
    metrics: dict          # summed over workers
    per_worker: list       # one metrics dict per worker
    traces: Optional[list] # per-worker event lists when collect_trace
    elapsed: float
    config: RunConfig

    def result_lines(self):
        return [line for _w, _s, line in self.emitted]

    def cache_hit_rate(self):
        h = self.metrics["cache_hits"]
        m = self.metrics["cache_misses"]
        return h / (h + m) if h + m else 1.0


def run_job(cfg: RunConfig, app: AppSpec, graph: Graph = None) -> JobResult:
    """Run one mining job to completion and return its results.

    `graph` may be passed pre-loaded to skip file reading; otherwise
    cfg.input_path is read.  Raises the first worker/responder error
    (with task provenance for app failures) after stopping the job.
    """
    t0 = time.perf_counter()
    if graph is None:
        if not cfg.input_path:
            raise ValueError("run_job needs a graph or cfg.input_path")
        graph = read_graph(cfg.input_path)
    if cfg.validate_graph and app.needs_undirected:
        check_undirected(graph)
    tables = partition_graph(graph, cfg.workers)
    seeds = derive_seeds(cfg.run_seed, cfg.ell)
    workdir = cfg.workdir or tempfile.mkdtemp(prefix="submine-run-")
    own_workdir = cfg.workdir is None
    agg = SharedAggregator(app.aggregator, cfg.workers) if app.aggregator else None
    transport = InProcTransport(cfg.workers)
    stop = threading.Event()
    errors = []
    elock = threading.Lock()

    def fail(e):
        with elock:
            errors.append(e)
        stop.set()

    workers = [
        Worker(i, cfg, app, tables[i], transport, agg, stop, seeds, workdir)
        for i in range(cfg.workers)
    ]
    responders = [
        threading.Thread(
            target=_responder_loop,
            args=(i, tables[i], app, transport, stop, fail, workers[i].resp_stats),
            name=f"responder-{i}",
            daemon=True,
        )
        for i in range(cfg.workers)
    ]
    computes = [
        threading.Thread(target=w.run, name=f"worker-{w.wid}", daemon=True)
        for w in workers
    ]
    try:
        for t in responders:
            t.start()
        for t in computes:
            t.start()
        for t in computes:
            t.join()
        for w in workers:
            if w.err is not None:
                fail(w.err)
    finally:
        transport.shutdown_responders()
        for t in responders:
            t.join(timeout=5.0)

    try:
        if errors:
            primary = next(
                (e for e in errors if not isinstance(e, JobAborted)), errors[0]
            )
            raise primary
        for w in workers:
            w.assert_drained()
        per_worker = [w.collect_metrics() for w in workers]
        totals = {}
        for m in per_worker:
            for k, v in m.items():
                totals[k] = totals.get(k, 0) + v
        created = totals["tasks_seeded"] + totals["tasks_spawned"]
        if created != totals["tasks_completed"]:
            raise EngineError(
                f"exactly-once violated: {created} tasks created, "
                f"{totals['tasks_completed']} completed"
            )
        emitted = [
            (w.wid, seed, line) for w in workers for seed, line in w.emitted
        ]
        return JobResult(
            aggregate=agg.final() if agg else None,
            emitted=emitted,
            metrics=totals,
            per_worker=per_worker,
            traces=[w.trace for w in workers] if cfg.collect_trace else None,
            elapsed=time.perf_counter() - t0,
            config=cfg,
        )
    finally:
        if own_workdir:
            shutil.rmtree(workdir, ignore_errors=True)
