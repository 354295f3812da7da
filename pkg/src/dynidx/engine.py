"""Scheduler for worst-case dynamization, generic over the stored items.

Items are (key, payload) pairs with a size in units (symbols of a document,
or 1 for a relation pair).  A *backend* supplies three things:

``unit(payload)``
    size of an item;
``make_dynamic()``
    an empty fully dynamic holder (level 0);
``build(items)``
    a static holder supporting lazy ``delete(key)``.

A backend may set ``filter_tombstones`` to have level builds drop items
deleted while the build was pending instead of replaying them.

Holders expose ``insert`` (dynamic only), ``delete(key) -> work``,
``alive_units``, ``deleted_units`` and ``items()``.

Layout
------
Levels ``C_0..C_r`` with caps ``max_i = 2 (n_f / L^2) L^(i eps)``, where
``L = max(log2 n_f, 4)`` and r is the first level whose cap reaches
``2 n_f / tau``.  Above them sit top collections.  Merging level j into j+1
is done in the background: ``C_j`` is locked (``L_j``), a new document goes
into a one-item temporary holder, and the job building ``N_{j+1}``
advances by ``rate * |T|`` units on every later update.  Jobs snapshot their
inputs when they start; deletions that hit an input afterwards are kept as
tombstones and replayed as lazy deletions when the result is swapped in.

Tops are purged in rounds of ``delta = n_f / (2 tau log2 tau)`` deleted
units: at each round boundary the top with the most deleted units is
rebuilt during the next round.  Level ``C_r`` overflowing with deletions is
parked as ``L'_r`` and folded into the next round.

All background work runs synchronously inside update calls and is metered
in ``work`` units (units fed to builders plus structure operations).
"""
import math

NF_MIN = 256
MAX_LEVELS = 12


def harmonic(k):
    return sum(1.0 / i for i in range(1, k + 1))


def layout(nf, epsilon, tau):
    """Caps max_0..max_r for reference size nf."""
    L = max(math.log2(max(nf, 2)), 4.0)
    goal = 2.0 * nf / tau
    caps = []
    for i in range(MAX_LEVELS + 1):
        cap = max(i + 1, int(2.0 * nf * L ** (i * epsilon) / (L * L)))
        if caps:
            cap = max(cap, caps[-1] + 1)
        caps.append(cap)
        if i >= 1 and cap >= goal:
            break
    return caps


def default_tau(nf):
    return max(2, math.ceil(math.log2(max(math.log2(max(nf, 4)), 2.0))))


class Slot:
    """A queryable holder plus its role in the hierarchy."""

    __slots__ = ("struct", "role", "level", "single", "job")

    def __init__(self, struct, role, level=None, single=False):
        self.struct = struct
        self.role = role
        self.level = level
        self.single = single
        self.job = None

    @property
    def alive(self):
        return self.struct.alive_units

    @property
    def deleted(self):
        return self.struct.deleted_units

    def __repr__(self):
        return f"Slot({self.role}, level={self.level}, alive={self.alive})"


class Job:
    """A background build; ``groups`` are lists of source slots."""

    def __init__(self, kind, groups, target=None, split_above=None):
        self.kind = kind
        self.groups = groups
        self.target = target
        self.split_above = split_above
        self.items = None
        self.size = 0
        self.progress = 0
        self.rate = 1
        self.tomb = set()
        self.tomb_units = {}
        self.active = False

    @property
    def sources(self):
        return [s for g in self.groups for s in g]

    def start(self, unit, deadline):
        self.items = [[it for s in g for it in s.struct.items()] for g in self.groups]
        self.size = sum(unit(p) for grp in self.items for _, p in grp)
        self.rate = max(1, math.ceil(self.size / max(1, deadline)))
        self.active = True

    @property
    def remaining(self):
        return max(0, self.size - self.progress)


class WorstCaseEngine:
    def __init__(self, backend, epsilon=0.5, tau=None, nf_min=NF_MIN):
        if not 0 < epsilon <= 1:
            raise ValueError("epsilon must be in (0, 1]")
        self.backend = backend
        self.epsilon = float(epsilon)
        self.fixed_tau = tau
        self.nf_min = int(nf_min)
        self.nf = self.nf_min
        self.n = 0
        self.registry = {}
        self.levels = [Slot(backend.make_dynamic(), "c", 0)]
        self.locked = {}
        self.temps = {}
        self.pending = {}
        self.tops = []
        self.lprime = []
        self.retired = []
        self.round_job = None
        self.round_counter = 0
        self.maint = []
        self.deferred = set()
        # instrumentation
        self.work = 0
        self.update_work = []
        self.max_work_ratio = 0.0
        self.max_work_excess = 0.0
        self.forced_completions = 0
        self.forced_by_kind = {}
        self.relock_conflicts = 0
        self.builds = 0
        self.build_units = 0
        self.rounds = 0
        self.relayouts = 0
        self._relayout(initial=True)

    # ------------------------------------------------------------------
    # layout
    def _relayout(self, initial=False):
        self.tau = self.fixed_tau or default_tau(self.nf)
        self.tau = max(2, int(self.tau))
        caps = layout(self.nf, self.epsilon, self.tau)
        r_old = len(self.levels) - 1
        while len(caps) - 1 < r_old:
            caps.append(caps[-1] * 2)
        self.caps = caps
        while len(self.levels) < len(caps):
            self.levels.append(None)
        self.delta = max(1.0, self.nf / (2 * self.tau * math.log2(self.tau)))
        self.big = self.nf / self.tau
        self.top_bound = (1 + harmonic(2 * self.tau)) * self.delta
        if not initial:
            self.relayouts += 1

    @property
    def r(self):
        return len(self.caps) - 1

    @property
    def log_eps(self):
        return max(math.log2(max(self.n, 2)), 4.0) ** self.epsilon

    # ------------------------------------------------------------------
    # holders
    def slots(self):
        for s in self.levels:
            if s is not None:
                yield s
        yield from self.locked.values()
        yield from self.temps.values()
        yield from self.tops
        yield from self.lprime
        yield from self.retired

    def _build(self, items, role, level=None, skip=()):
        struct = self.backend.build(items)
        units = sum(self.backend.unit(p) for _, p in items)
        self.builds += 1
        self.build_units += units
        slot = Slot(struct, role, level, single=len(items) == 1)
        for k, _ in items:
            if k not in skip:
                self.registry[k] = slot
        return slot

    def _remove_slot(self, slot):
        for j, s in enumerate(self.levels):
            if s is slot:
                self.levels[j] = None if j else Slot(self.backend.make_dynamic(), "c", 0)
                return
        for d in (self.locked, self.temps):
            for k, s in list(d.items()):
                if s is slot:
                    del d[k]
                    return
        for lst in (self.tops, self.lprime, self.retired):
            for i, s in enumerate(lst):
                if s is slot:
                    del lst[i]
                    return

    def _prune(self, slot):
        """Drop a holder that no longer stores anything alive."""
        if slot.job is None and slot.alive == 0 and not (slot.role == "c" and slot.level == 0):
            self._remove_slot(slot)

    # ------------------------------------------------------------------
    # jobs
    def _start(self, job, deadline):
        for s in job.sources:
            s.job = job
        job.start(self.backend.unit, deadline)

    def _advance(self, job, amount):
        step = min(job.remaining, amount)
        job.progress += step
        self.work += step
        return job.progress >= job.size

    def _force(self, job):
        self.forced_completions += 1
        self.forced_by_kind[job.kind] = self.forced_by_kind.get(job.kind, 0) + 1
        self.work += job.remaining
        job.progress = job.size
        self._complete(job)

    def _pack(self, items, split_above):
        unit = self.backend.unit
        total = sum(unit(p) for _, p in items)
        if split_above is None or total <= split_above:
            return [items] if items else []
        parts_n = math.ceil(total / (self.big * 2))
        target = total / parts_n
        parts = []
        cur = []
        acc = 0
        for it in sorted(items, key=lambda t: -unit(t[1])):
            u = unit(it[1])
            if u >= target:
                parts.append([it])
                continue
            cur.append(it)
            acc += u
            if acc >= target:
                parts.append(cur)
                cur, acc = [], 0
        if cur:
            if parts and acc < self.big / 2 and len(parts[-1]) > 1:
                parts[-1].extend(cur)
            else:
                parts.append(cur)
        return parts

    def _complete(self, job):
        for s in job.sources:
            s.job = None
            self._remove_slot(s)
        if job.kind in ("level", "newtop"):
            self.pending.pop(job.target, None)
        if job is self.round_job:
            self.round_job = None
        if self.maint and job is self.maint[0]:
            self.maint.pop(0)
            self._activate_maint()
        if job.kind == "level":
            # tombstones are replayed as lazy deletions on the new holder
            items = job.items[0]
            if getattr(self.backend, "filter_tombstones", False):
                items = [it for it in items if it[0] not in job.tomb]
            if all(k in job.tomb for k, _ in items):
                return
            t = job.target
            slot = self._build(items, "c", t, skip=job.tomb)
            for k, _ in items:
                if k in job.tomb:
                    self.work += slot.struct.delete(k)
            if slot.alive > self.caps[t]:
                slot.role = "retired"
                slot.level = None
                self.retired.append(slot)
                self._enqueue_maint([[slot]], split_above=2 * self.big)
            else:
                self.levels[t] = slot
                self.deferred.add(t)
            return
        # top collections are rebuilt from alive items only
        for grp in job.items:
            alive = [it for it in grp if it[0] not in job.tomb]
            for part in self._pack(alive, job.split_above):
                self.tops.append(self._build(part, "top"))

    def _enqueue_maint(self, groups, split_above):
        job = Job("maint", groups, split_above=split_above)
        for s in job.sources:
            s.job = job
        self.maint.append(job)
        if len(self.maint) == 1:
            self._activate_maint()

    def _activate_maint(self):
        if not self.maint:
            return
        job = self.maint[0]
        job.start(self.backend.unit, self.big)
        # sized so that the whole queue finishes within n_f/tau update units
        queued = job.size + sum(s.alive for j in self.maint[1:] for s in j.sources)
        job.rate = max(1, math.ceil(queued / max(1.0, self.big)))

    # ------------------------------------------------------------------
    # updates
    def _begin(self):
        self.work = 0

    def _end(self, units):
        ratio = self.work / max(1, units)
        self.update_work.append(ratio)
        self.max_work_ratio = max(self.max_work_ratio, ratio)
        bound = 8 * self.log_eps * (self.r + 1)
        self.max_work_excess = max(self.max_work_excess, ratio / bound)

    def _background(self, units):
        for t in sorted(self.pending):
            job = self.pending.get(t)
            if job is not None and self._advance(job, job.rate * units):
                self._complete(job)
        if self.maint:
            job = self.maint[0]
            if self._advance(job, job.rate * units):
                self._complete(job)

    def insert(self, key, payload):
        if key in self.registry:
            raise KeyError(f"{key!r} already present")
        m = self.backend.unit(payload)
        self._begin()
        self._background(m)
        self.n += m
        self._route(key, payload, m)
        if self.n >= 2 * self.nf:
            self._grow()
        self._run_deferred()
        self._end(m)

    def _route(self, key, payload, m):
        if m >= self.big:
            self.tops.append(self._build([(key, payload)], "top"))
            self.work += m
            return
        c0 = self.levels[0]
        if c0.alive + m <= self.caps[0]:
            self.work += c0.struct.insert(key, payload)
            self.registry[key] = c0
            return
        while True:
            natural = None
            for j in range(self.r):
                cj = self.levels[j]
                cj1 = self.levels[j + 1]
                size = (cj.alive if cj else 0) + (cj1.alive if cj1 else 0) + m
                if size > self.caps[j + 1]:
                    continue
                if natural is None:
                    natural = j
                if (j + 1) in self.pending or (cj is not None and cj.job is not None):
                    continue
                if natural != j:
                    self.relock_conflicts += 1
                if m >= self.caps[j] / 2:
                    self._merge_now(j, (key, payload))
                else:
                    self._lock(j, (key, payload))
                return
            if natural is not None:
                self.relock_conflicts += 1
            cr = self.levels[self.r]
            blocker = self.pending.get(self.r + 1)
            if blocker is None and cr is not None and cr.job is not None:
                blocker = cr.job
            if blocker is None:
                self._lock(self.r, (key, payload))
                return
            self._force(blocker)

    def _merge_now(self, j, item):
        items = [item]
        for lv in (j, j + 1):
            s = self.levels[lv]
            if s is not None:
                items.extend(s.struct.items())
        for lv in (j, j + 1):
            if self.levels[lv] is not None:
                self._remove_slot(self.levels[lv])
        slot = self._build(items, "c", j + 1)
        self.work += sum(self.backend.unit(p) for _, p in items)
        self.levels[j + 1] = slot

    def _lock(self, j, item=None):
        src = []
        old = self.levels[j]
        if j == 0:
            self.levels[0] = Slot(self.backend.make_dynamic(), "c", 0)
        else:
            self.levels[j] = None
        if old is not None and old.alive > 0:
            old.role = "locked"
            self.locked[j] = old
            src.append(old)
        target = j + 1
        if j < self.r:
            nxt = self.levels[j + 1]
            if nxt is not None:
                src.append(nxt)
        if item is not None:
            temp = self._build([item], "temp", target)
            self.work += self.backend.unit(item[1])
            self.temps[target] = temp
            src.append(temp)
        if not src:
            return
        kind = "level" if j < self.r else "newtop"
        job = Job(kind, [src], target=target, split_above=2 * self.big)
        self._start(job, max(1, self.caps[j] // 2))
        self.pending[target] = job

    def delete(self, key):
        slot = self.registry.get(key)
        if slot is None:
            raise KeyError(f"{key!r} not present")
        m = self.backend.unit_of(slot.struct, key)
        self._begin()
        self._background(m)
        slot = self.registry.pop(key)
        self.work += slot.struct.delete(key)
        self.n -= m
        job = slot.job
        if job is not None and job.active:
            job.tomb.add(key)
            job.tomb_units[id(slot)] = job.tomb_units.get(id(slot), 0) + m
            self.work += m
        if slot.role == "c" and slot.level and slot.job is None:
            self.deferred.add(slot.level)
        self._prune(slot)
        self._round_tick(m)
        if self.n <= self.nf / 2 and self.nf > self.nf_min:
            self._shrink()
        self._run_deferred()
        self._end(m)

    def _run_deferred(self):
        for j in sorted(self.deferred):
            s = self.levels[j] if j < len(self.levels) else None
            if s is None or s.job is not None or s.role != "c":
                self.deferred.discard(j)
                continue
            if s.deleted < self.caps[j] / 2:
                self.deferred.discard(j)
                continue
            if j == self.r:
                self.levels[j] = None
                s.role = "lprime"
                s.level = None
                self.lprime.append(s)
                self.deferred.discard(j)
                continue
            nxt = self.levels[j + 1]
            if (j + 1) in self.pending or (nxt is not None and nxt.job is not None):
                continue
            self.deferred.discard(j)
            self._lock(j)

    # ------------------------------------------------------------------
    # top purging rounds
    def _round_tick(self, m):
        job = self.round_job
        if job is not None and self._advance(job, job.rate * m):
            self._complete(job)
        self.round_counter += m
        while self.round_counter >= self.delta:
            self.round_counter -= self.delta
            if self.round_job is not None:
                self._force(self.round_job)
            self._start_round()

    def m_value(self, slot):
        """Deleted units counted against a top for the purge schedule."""
        job = slot.job
        if job is None:
            return slot.deleted
        if job.kind == "round":
            return job.tomb_units.get(id(slot), 0)
        return None

    def _start_round(self):
        self.rounds += 1
        free = [s for s in self.tops if s.job is None and not s.single]
        chosen = max(free, key=lambda s: s.deleted, default=None)
        if chosen is not None and chosen.deleted == 0:
            chosen = None
        groups = []
        if chosen is not None:
            grp = [chosen]
            if chosen.alive < self.big / 2:
                partner = max((s for s in free if s is not chosen), key=lambda s: s.alive,
                              default=None)
                if partner is not None:
                    grp.append(partner)
            groups.append(grp)
        lps = [s for s in self.lprime if s.job is None]
        if lps:
            lp_alive = sum(s.alive for s in lps)
            if lp_alive >= self.big / 2 or not free:
                groups.append(lps)
            else:
                taken = groups[0] if groups else []
                partner = max(free, key=lambda s: s.alive)
                if partner in taken:
                    taken.extend(lps)
                else:
                    groups.append([partner] + lps)
        if not groups:
            return
        job = Job("round", groups, split_above=2 * self.big)
        self._start(job, self.delta)
        self.round_job = job

    # ------------------------------------------------------------------
    # reference-size maintenance
    def _grow(self):
        self.nf = self.n
        self._relayout()
        small = sorted((s for s in self.tops if s.job is None and s.alive < self.big),
                       key=lambda s: s.alive)
        groups = []
        cur = []
        acc = 0
        for s in small:
            cur.append(s)
            acc += s.alive
            if acc >= self.big:
                groups.append(cur)
                cur, acc = [], 0
        if cur:
            if groups:
                groups[-1].extend(cur)
            elif len(cur) > 1:
                groups.append(cur)
        for g in groups:
            self._enqueue_maint([g], split_above=2 * self.big)

    def _shrink(self):
        self.nf = max(self.n, self.nf_min)
        self._relayout()
        for s in list(self.tops):
            if s.job is not None:
                continue
            if (not s.single and s.alive > 4 * self.big) or s.deleted > 0:
                self._enqueue_maint([[s]], split_above=4 * self.big)
        for j in range(len(self.levels)):
            s = self.levels[j]
            if s is None or s.job is not None or s.alive <= self.caps[j]:
                continue
            if j == 0:
                self.levels[0] = Slot(self.backend.make_dynamic(), "c", 0)
            else:
                self.levels[j] = None
            s.role = "retired"
            s.level = None
            self.retired.append(s)
            self._enqueue_maint([[s]], split_above=2 * self.big)
        # smaller caps may put surviving levels over their deletion limit
        self.deferred.update(j for j in range(1, len(self.levels)) if self.levels[j] is not None)

    # ------------------------------------------------------------------
    # checks and reporting
    def top_violations(self):
        """Tops whose purge-schedule count exceeds (1 + h_{2 tau}) delta."""
        bad = []
        for s in self.tops:
            if s.single:
                continue
            m = self.m_value(s)
            if m is not None and m > self.top_bound + 1e-9:
                bad.append((s, m))
        return bad

    def level_violations(self):
        """Levels with too many deleted units and no merge under way."""
        bad = []
        for j, s in enumerate(self.levels):
            if s is None or j == 0 or s.job is not None:
                continue
            if s.deleted > self.caps[j] / 2 and j not in self.deferred:
                bad.append((j, s.deleted))
        return bad

    def check(self):
        """Assert registry/holder consistency (test helper)."""
        seen = {}
        for s in self.slots():
            for k, _ in s.struct.items():
                assert k not in seen, f"{k!r} stored twice"
                seen[k] = s
        assert set(seen) == set(self.registry), "registry mismatch"
        for k, s in seen.items():
            assert self.registry[k] is s
        assert sum(s.alive for s in self.slots()) == self.n
        c0 = self.levels[0]
        assert c0.alive <= self.caps[0]
        for j in range(1, len(self.levels)):
            s = self.levels[j]
            if s is not None and s.job is None:
                assert s.alive <= self.caps[j], (j, s.alive, self.caps[j])
        for s in self.temps.values():
            assert len(s.struct.items()) <= 1

    def stats(self):
        st = {"n": self.n, "nf": self.nf, "tau": self.tau, "r": self.r,
              "delta": round(self.delta, 3), "tops": len(self.tops),
              "pending": len(self.pending), "maint_queue": len(self.maint),
              "lprime": len(self.lprime), "retired": len(self.retired),
              "temps": len(self.temps), "locked": len(self.locked),
              "builds": self.builds, "build_units": self.build_units,
              "rounds": self.rounds, "relayouts": self.relayouts,
              "forced_completions": self.forced_completions,
              "forced_level": self.forced_by_kind.get("level", 0),
              "forced_newtop": self.forced_by_kind.get("newtop", 0),
              "forced_round": self.forced_by_kind.get("round", 0),
              "relock_conflicts": self.relock_conflicts,
              "max_work_ratio": round(self.max_work_ratio, 3)}
        for j, s in enumerate(self.levels):
            st[f"cap_{j}"] = self.caps[j]
            st[f"level_{j}_alive"] = s.alive if s else 0
            st[f"level_{j}_deleted"] = s.deleted if s else 0
        st["locked_alive"] = sum(s.alive for s in self.locked.values())
        st["temp_alive"] = sum(s.alive for s in self.temps.values())
        st["top_alive"] = sum(s.alive for s in self.tops)
        st["lprime_alive"] = sum(s.alive for s in self.lprime)
        st["retired_alive"] = sum(s.alive for s in self.retired)
        return st
