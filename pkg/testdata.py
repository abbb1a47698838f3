"""
Fixture condivise dagli script di test.

Istanze casuali generate dallo stream SplitMix64 (quindi riproducibili
senza dipendere da random/numpy.random) e un csv-bundle sintetico in
formato Montreal con coordinate lon/lat, più un piccolo file in formato CAB.
"""

import math
import traceback
from pathlib import Path
from typing import Callable, List, Sequence, Tuple

import numpy as np

from core.model import GammaRule, Instance, Params, make_instance, prepare_instance
from core.prng import SplitMix64


def random_instance(n: int, p: int, alpha: float, seed: int, r: float = 1.7,
                    vartheta: float = 0.1, strict: bool = True) -> Instance:
    """Punti uniformi nel quadrato 100x100, tempi euclidei, istanza già preparata."""
    rng = SplitMix64(seed)
    xs = [rng.uniform_range(0.0, 100.0) for _ in range(n)]
    ys = [rng.uniform_range(0.0, 100.0) for _ in range(n)]
    populations = [rng.uniform_range(1.0, 100.0) for _ in range(n)]
    time = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            if i != j:
                time[i, j] = math.hypot(xs[i] - xs[j], ys[i] - ys[j])
    params = Params(p=p, alpha=alpha, r=r, vartheta=vartheta, revenue=GammaRule(seed), strict_filter=strict)
    return prepare_instance(make_instance(time, populations, params))


# Quartieri fittizi attorno a Montréal (lon, lat)
MONTREAL_NODES = [
    ("Ville-Marie", 89000.0, -73.5673, 45.5017),
    ("Plateau", 104000.0, -73.5800, 45.5225),
    ("Rosemont", 139000.0, -73.5740, 45.5430),
    ("Verdun", 69000.0, -73.5680, 45.4580),
    ("Outremont", 24000.0, -73.6080, 45.5190),
    ("Saint-Laurent", 98000.0, -73.6900, 45.5070),
    ("Anjou", 42000.0, -73.5610, 45.6060),
    ("LaSalle", 76000.0, -73.6300, 45.4310),
]


def _km(a, b) -> float:
    lon1, lat1 = math.radians(a[0]), math.radians(a[1])
    lon2, lat2 = math.radians(b[0]), math.radians(b[1])
    x = (lon2 - lon1) * math.cos((lat1 + lat2) / 2.0)
    y = lat2 - lat1
    return 6371.0 * math.hypot(x, y)


def write_montreal_bundle(directory, p: int = 3, alpha: float = 0.5, seed: int = 7,
                          with_coordinates: bool = True) -> Path:
    """Scrive un csv-bundle sintetico; tempi in minuti a 30 km/h."""
    path = Path(directory)
    path.mkdir(parents=True, exist_ok=True)
    n = len(MONTREAL_NODES)
    with open(path / "manifest.txt", 'w', encoding='utf-8') as f:
        f.write(f"# istanza sintetica\nn={n}\np={p}\nalpha={alpha}\nr=1.7\nvartheta=0.1\nseed={seed}\n")
    with open(path / "nodes.csv", 'w', encoding='utf-8') as f:
        f.write("id,label,population,lon,lat\n" if with_coordinates else "id,label,population\n")
        for i, (label, population, lon, lat) in enumerate(MONTREAL_NODES):
            extra = f",{lon},{lat}" if with_coordinates else ""
            f.write(f"{i},{label},{population}{extra}\n")
    with open(path / "edges.csv", 'w', encoding='utf-8') as f:
        f.write("k,m,time\n")
        for k in range(n):
            for m in range(k + 1, n):
                a, b = MONTREAL_NODES[k][2:], MONTREAL_NODES[m][2:]
                f.write(f"{k},{m},{_km(a, b) * 2.0:.6f}\n")
    return path


def write_cab_fixture(path, size: int = 8, seed: int = 11) -> Path:
    """
    File in formato CAB ridotto: dimensione dichiarata in testa, matrice dei
    flussi W_ij e matrice dei costi euclidei, entrambe size x size.
    """
    rng = SplitMix64(seed)
    points = [(rng.uniform_range(0.0, 100.0), rng.uniform_range(0.0, 100.0)) for _ in range(size)]
    flows = [[0.0 if i == j else rng.uniform_range(1.0, 500.0) for j in range(size)] for i in range(size)]
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8') as f:
        f.write(f"{size}\n")
        for row in flows:
            f.write(" ".join(f"{value:.3f}" for value in row) + "\n")
        for a in points:
            f.write(" ".join(f"{math.dist(a, b):.4f}" for b in points) + "\n")
    return path


def run_tests(title: str, tests: Sequence[Tuple[str, Callable]]) -> int:
    """Esegue i test, stampa il riepilogo e restituisce il codice di uscita."""
    print("\n" + "=" * 60)
    print(title)
    print("=" * 60)

    results: List[Tuple[str, bool]] = []
    for name, test_func in tests:
        print(f"\n--- {name}")
        try:
            test_func()
            results.append((name, True))
        except Exception as e:
            print(f"\n❌ ERRORE nel test '{name}': {type(e).__name__}: {e}")
            traceback.print_exc()
            results.append((name, False))

    print("\n" + "=" * 60)
    print("RIEPILOGO TEST")
    print("=" * 60)
    passed = sum(1 for _, ok in results if ok)
    for name, ok in results:
        print(f"{'✅ PASS' if ok else '❌ FAIL'}: {name}")
    print("\n" + "-" * 60)
    print(f"Risultato: {passed}/{len(results)} test passati")
    return 0 if passed == len(results) else 1
