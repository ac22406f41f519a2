from pathlib import Path
from typing import Union
import logging

import numpy as np
import scipy.sparse as sp

logger = logging.getLogger(__name__)


def write_coo(path: Union[str, Path], matrix) -> Path:
    """
    Write a matrix in coordinate text format.

    One "row col value" line per stored nonzero with 0-based indices, sorted by (row, col), values
    printed with 17 significant digits so the dump round-trips doubles.

    Args:
        path: output file
        matrix: scipy sparse matrix or dense 2D array

    Returns:
        The written path
    """
    path = Path(path)
    if sp.issparse(matrix):
        coo = sp.coo_matrix(matrix)
    else:
        dense = np.asarray(matrix, dtype=float)
        if dense.ndim != 2:
            raise ValueError(f"Expected a 2D matrix, got {dense.ndim} dimensions")
        coo = sp.coo_matrix(dense)
    coo.sum_duplicates()

    order = np.lexsort((coo.col, coo.row))
    with open(path, "w") as f:
        for row, col, value in zip(coo.row[order], coo.col[order], coo.data[order]):
            f.write(f"{row} {col} {value:.17g}\n")

    logger.info(f"Wrote {coo.nnz} entries of a {coo.shape[0]}x{coo.shape[1]} matrix to {path}")
    return path
