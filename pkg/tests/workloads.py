"""Seeded random workloads shared by the property and acceptance tests."""
import random

SIGMAS = (2, 4, 26, 256)


def doc_session(seed, n_ops=300, sigma=None, max_len=None):
    """Ops ("ins", id, syms) / ("del", id) / ("q", pattern) with an
    insert-heavy first half and a delete-heavy second half."""
    rnd = random.Random(seed)
    sigma = sigma or SIGMAS[seed % len(SIGMAS)]
    max_len = max_len or rnd.choice((8, 30, 80))
    alive = {}
    ops = []
    nid = 0
    for step in range(n_ops):
        p_del = 0.2 if step < n_ops // 2 else 0.55
        x = rnd.random()
        if alive and x < p_del:
            d = rnd.choice(sorted(alive))
            del alive[d]
            ops.append(("del", d))
        elif x < 0.75 or not alive:
            s = [rnd.randint(1, sigma) for _ in range(rnd.randint(1, max_len))]
            alive[nid] = s
            ops.append(("ins", nid, s))
            nid += 1
        else:
            if rnd.random() < 0.75:
                s = alive[rnd.choice(sorted(alive))]
                i = rnd.randrange(len(s))
                pat = s[i:i + rnd.randint(1, 6)]
            else:
                pat = [rnd.randint(1, sigma) for _ in range(rnd.randint(1, 3))]
            ops.append(("q", pat))
    return sigma, ops


def relation_session(seed, n_ops=400, n_obj=None, n_lab=None):
    rnd = random.Random(seed)
    n_obj = n_obj or rnd.choice((5, 60, 2000))
    n_lab = n_lab or rnd.choice((3, 40, 2000))
    pairs = set()
    ops = []
    for step in range(n_ops):
        p_rem = 0.2 if step < n_ops // 2 else 0.5
        x = rnd.random()
        if pairs and x < p_rem:
            pr = rnd.choice(sorted(pairs))
            pairs.discard(pr)
            ops.append(("rem",) + pr)
        elif x < 0.7 or not pairs:
            pr = (rnd.randrange(n_obj), rnd.randrange(n_lab))
            if pr in pairs:
                continue
            pairs.add(pr)
            ops.append(("add",) + pr)
        else:
            if pairs and rnd.random() < 0.7:
                o, a = rnd.choice(sorted(pairs))
                o = o if rnd.random() < 0.5 else rnd.randrange(n_obj)
            else:
                o, a = rnd.randrange(n_obj), rnd.randrange(n_lab)
            ops.append(("q", o, a))
    return ops
