#!/usr/bin/env python3
"""Convert a nettack-style .npz citation graph into the gani dataset layout.

The input holds a CSR adjacency (adj_data, adj_indices, adj_indptr,
adj_shape), a CSR attribute matrix (attr_*) and a labels array. The output
directory gets manifest.json, edges.csv, features.csv and labels.csv.

The full graph is written; gani restricts it to the largest connected
component at load time. Directed or weighted adjacencies are symmetrised and
binarised, and self-loops are dropped.

    python3 scripts/convert_npz.py cora.npz data/cora --name cora
"""

import argparse
import json
import pathlib
import sys

import numpy as np
import scipy.sparse as sp


def load_npz(path):
    with np.load(path, allow_pickle=True) as f:
        arrays = dict(f)
    adj = sp.csr_matrix(
        (arrays["adj_data"], arrays["adj_indices"], arrays["adj_indptr"]),
        shape=tuple(arrays["adj_shape"]),
    )
    if "attr_data" in arrays:
        attr = sp.csr_matrix(
            (arrays["attr_data"], arrays["attr_indices"], arrays["attr_indptr"]),
            shape=tuple(arrays["attr_shape"]),
        )
    elif "attr_matrix" in arrays:
        attr = sp.csr_matrix(arrays["attr_matrix"])
    else:
        raise ValueError("no attribute matrix in " + str(path))
    labels = arrays["labels"]
    if labels.ndim == 2:
        labels = labels.argmax(axis=1)
    return adj, attr, np.asarray(labels).ravel()


def write_dataset(out, name, adj, attr, labels, kind=None):
    n = adj.shape[0]
    if attr.shape[0] != n or labels.shape[0] != n:
        raise ValueError("adjacency, attributes and labels disagree on node count")

    # Relabel classes to 0..C-1 in order of first id.
    classes, labels = np.unique(labels, return_inverse=True)

    adj = adj.maximum(adj.T).tocoo()
    mask = adj.row < adj.col
    edges = sorted(set(zip(adj.row[mask].tolist(), adj.col[mask].tolist())))

    attr = attr.tocsr()
    attr.sum_duplicates()
    attr.eliminate_zeros()
    if (attr.data < 0).any():
        raise ValueError("negative feature values are not supported")
    if kind is None:
        kind = "binary" if np.all(attr.data == 1) else "continuous"

    out.mkdir(parents=True, exist_ok=True)
    with open(out / "edges.csv", "w", newline="\n") as f:
        f.write("u,v\n")
        f.writelines(f"{u},{v}\n" for u, v in edges)
    with open(out / "features.csv", "w", newline="\n") as f:
        f.write("node,index,value\n")
        for i in range(n):
            lo, hi = attr.indptr[i], attr.indptr[i + 1]
            order = np.argsort(attr.indices[lo:hi], kind="stable")
            for j, v in zip(attr.indices[lo:hi][order], attr.data[lo:hi][order]):
                f.write(f"{i},{j},{repr(float(v)) if kind == 'continuous' else 1}\n")
    with open(out / "labels.csv", "w", newline="\n") as f:
        f.write("label\n")
        f.writelines(f"{c}\n" for c in labels.tolist())
    manifest = {
        "name": name,
        "num_nodes": int(n),
        "num_features": int(attr.shape[1]),
        "num_classes": int(len(classes)),
        "feature_kind": kind,
        "edges": "edges.csv",
        "features": "features.csv",
        "labels": "labels.csv",
    }
    with open(out / "manifest.json", "w") as f:
        json.dump(manifest, f, indent=2)
        f.write("\n")
    return manifest


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("npz", type=pathlib.Path)
    ap.add_argument("out", type=pathlib.Path)
    ap.add_argument("--name", help="dataset name (default: file stem)")
    ap.add_argument("--kind", choices=["binary", "continuous"],
                    help="override the detected feature kind")
    args = ap.parse_args(argv)
    adj, attr, labels = load_npz(args.npz)
    m = write_dataset(args.out, args.name or args.npz.stem, adj, attr, labels, args.kind)
    print(f"wrote {m['num_nodes']} nodes, {m['num_features']} {m['feature_kind']} features, "
          f"{m['num_classes']} classes to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
