"""scikit-learn style front end."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from . import _validation as V
from .exceptions import ValidationError
from .functions import BanachSpec, VecFunction, apply_operator
from .ftype import estimate_constant, ratio
from .transform import fourier


class FourierTypeEstimator(BaseEstimator):
    """Estimate the Fourier-type norm of an operator on a group model.

    ``fit(X)`` takes the operator (an :class:`~lcaft.functions.OperatorSpec`
    or a complex matrix) and stores ``lower_bound_``, ``witness_`` and the
    full ``estimate_``.  ``predict(X)`` returns the ratio of each witness in
    ``X`` for the fitted operator; ``score`` is the fitted bound.
    """

    def __init__(self, group="Z4", p=1.5, restarts=32, max_iter=500, tol=1e-9, support_size=None,
                 structured_starts=True, grow_support=False, domain_q=2.0, codomain_q=2.0,
                 random_state=0, n_jobs=None):
        self.group = group
        self.p = p
        self.restarts = restarts
        self.max_iter = max_iter
        self.tol = tol
        self.support_size = support_size
        self.structured_starts = structured_starts
        self.grow_support = grow_support
        self.domain_q = domain_q
        self.codomain_q = codomain_q
        self.random_state = random_state
        self.n_jobs = n_jobs

    def fit(self, X, y=None):
        g = V.check_group(self.group)
        p = V.check_exponent(self.p)
        T = V.check_operator(X, self.domain_q, self.codomain_q)
        est = estimate_constant(
            g, T, p,
            restarts=V.check_positive_int("restarts", self.restarts),
            max_iter=V.check_positive_int("max_iter", self.max_iter),
            tol=V.check_tolerance(self.tol),
            support_size=self.support_size,
            seed=V.check_seed(self.random_state),
            structured=bool(self.structured_starts),
            grow_support=bool(self.grow_support),
            n_jobs=self.n_jobs,
        )
        self.group_ = g
        self.operator_ = T
        self.estimate_ = est
        self.lower_bound_ = est.lower_bound
        self.witness_ = est.witness
        self.n_restarts_ = est.restarts
        return self

    def predict(self, X):
        check_is_fitted(self, "estimate_")
        if isinstance(X, VecFunction):
            X = [X]
        return np.array([ratio(self.group_, self.operator_, self.p, f).value for f in X])

    def score(self, X=None, y=None):
        check_is_fitted(self, "estimate_")
        return self.lower_bound_


class FourierTransformer(TransformerMixin, BaseEstimator):
    """``f -> [F^G, T] f`` as a transformer.

    ``transform`` accepts a :class:`VecFunction` or a dense ``(|G|, dim)``
    array of values listed in :meth:`GroupModel.points` order; dense input
    gives dense output over the dual points.
    """

    def __init__(self, group="Z4", operator=None):
        self.group = group
        self.operator = operator

    def fit(self, X=None, y=None):
        self.group_ = V.check_group(self.group)
        self.operator_ = None if self.operator is None else V.check_operator(self.operator)
        return self

    def transform(self, X):
        check_is_fitted(self, "group_")
        g = self.group_
        if isinstance(X, VecFunction):
            f = X
        else:
            if not g.is_finite:
                raise ValidationError("X", "dense input needs a finite group model")
            arr = np.asarray(X, dtype=complex)
            if arr.ndim == 1:
                arr = arr[:, None]
            if arr.shape[0] != g.order:
                raise ValidationError("X", f"expected {g.order} rows, got {arr.shape[0]}")
            dim = arr.shape[1]
            q = self.operator_.domain.q if self.operator_ is not None else 2.0
            f = VecFunction(g, BanachSpec(dim, q), np.array(g.points()), arr)
        if self.operator_ is not None:
            f = apply_operator(self.operator_, f)
        F = fourier(g, f)
        if isinstance(X, VecFunction):
            return F
        out = np.zeros((F.model.order, F.space.dim), dtype=complex)
        sizes = [a.size for a in F.model.axes]
        idx = np.ravel_multi_index(tuple(F.points.T), sizes)
        out[idx] = F.values
        return out
