"""Shared test helpers."""

import dataclasses

import numpy as np

from berlu.activations import ActivationSpec
from berlu.trainer import DenseNet, forward_backward, _forward


def _branch_ids(spec: ActivationSpec, pre_list):
    """Classify every pre-activation into a branch of the piecewise function."""
    if spec.kind == "berlu":
        edges = [-spec.epsilon, spec.epsilon]
    elif spec.kind in ("relu", "leaky_relu", "prelu"):
        edges = [0.0]
    else:
        return None  # smooth everywhere
    return [np.digitize(h, edges) for h in pre_list]


def _perturbed(net: DenseNet, group, idx, delta):
    if group == "w":
        li, r, c = idx
        w = [w.copy() for w in net.weights]
        w[li][r, c] += delta
        return dataclasses.replace(net, weights=tuple(w))
    if group == "b":
        li, r = idx
        b = [b.copy() for b in net.biases]
        b[li][r] += delta
        return dataclasses.replace(net, biases=tuple(b))
    a = net.alphas.copy()
    a[idx] += delta
    return dataclasses.replace(net, alphas=a)


def _loss(net, x, y):
    return forward_backward(net, x, y)[0]


def network_grad_check(net, x, y, n_params=20, step=1e-4, seed=0,
                       include_alphas=True):
    """Central-difference check of forward_backward on random parameters.

    Piecewise activations make the loss only C^1 (or C^0 for ReLU-family):
    a finite difference straddling a branch boundary measures the wrong
    thing, so draws whose +/-step evaluations flip any unit across a branch
    are discarded and redrawn, mirroring the kink-adjacent exclusions used
    for pointwise derivative checks.

    Returns the worst relative error over the accepted parameters, with the
    denominator floored at |largest gradient| / 100 so that parameters whose
    own gradient is negligible are compared on the scale of the problem.
    """
    rng = np.random.default_rng(seed)
    _, grads = forward_backward(net, x, y)
    spec = net.activation

    choices = []
    if include_alphas and len(net.alphas):
        choices.extend(("a", i) for i in range(len(net.alphas)))
    while len(choices) < n_params:
        li = int(rng.integers(0, len(net.weights)))
        if rng.random() < 0.8:
            r = int(rng.integers(0, net.weights[li].shape[0]))
            c = int(rng.integers(0, net.weights[li].shape[1]))
            choices.append(("w", (li, r, c)))
        else:
            r = int(rng.integers(0, net.biases[li].shape[0]))
            choices.append(("b", (li, r)))

    def analytic(group, idx):
        if group == "w":
            li, r, c = idx
            return float(grads.weights[li][r, c])
        if group == "b":
            li, r = idx
            return float(grads.biases[li][r])
        return float(grads.alphas[idx])

    g_scale = max(
        max(float(np.abs(g).max()) for g in grads.weights),
        max(float(np.abs(g).max()) for g in grads.biases),
        float(np.abs(grads.alphas).max()) if len(grads.alphas) else 0.0,
    )
    floor = max(g_scale / 100.0, 1e-8)

    worst = 0.0
    checked = 0
    max_draws = 10 * n_params
    for group, idx in choices:
        if len(choices) > max_draws:
            break
        net_p = _perturbed(net, group, idx, +step)
        net_m = _perturbed(net, group, idx, -step)
        base_branches = _branch_ids(spec, _forward(net, x)[0])
        if base_branches is not None:
            bp = _branch_ids(spec, _forward(net_p, x)[0])
            bm = _branch_ids(spec, _forward(net_m, x)[0])
            crossed = any(
                not (np.array_equal(b0, b1) and np.array_equal(b0, b2))
                for b0, b1, b2 in zip(base_branches, bp, bm)
            )
            if crossed:
                # redraw a replacement weight entry
                li = int(rng.integers(0, len(net.weights)))
                r = int(rng.integers(0, net.weights[li].shape[0]))
                c = int(rng.integers(0, net.weights[li].shape[1]))
                choices.append(("w", (li, r, c)))
                continue
        fd = (_loss(net_p, x, y) - _loss(net_m, x, y)) / (2.0 * step)
        an = analytic(group, idx)
        rel = abs(an - fd) / max(abs(an), abs(fd), floor)
        worst = max(worst, rel)
        checked += 1
    assert checked >= n_params, f"only {checked} clean parameters checked"
    return worst
