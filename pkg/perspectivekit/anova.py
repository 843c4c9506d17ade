"""
Sequential (Type-I) regression ANOVA over a linear probability model.

The response is the 0/1 label, the predictors are the attribute scores in model order,
optionally followed by pairwise interaction products. Sums of squares come from fitted
values of nested least-squares fits:

    SS_T = sum (y - ybar)^2
    SS_i = SS_R(terms <= i) - SS_R(terms < i)
    SS_E = sum (y - yhat_full)^2
"""

import json
import math
from collections import namedtuple

import numpy as np

from . import config
from . import PerspectiveKitException
from .corpus import ATTRIBUTES
from .numerics import least_squares, f_sf, probit, RankDeficiencyError
from .similarity import SignificanceVector

log = config.log

DECOMPOSITION_RTOL = 1e-8
DEGENERATE_RTOL = 1e-12
P_FLOOR = 1e-300

SIGNIF_THRESHOLDS = ((0.001, '***'), (0.01, '**'), (0.05, '*'), (0.1, '.'))
SIGNIF_LEGEND = "Signif. codes:  0 ‘***’ 0.001 ‘**’ 0.01 ‘*’ 0.05 ‘.’ 0.1 ‘ ’ 1"


class InsufficientDataError(PerspectiveKitException):
    pass


class DegenerateFitError(PerspectiveKitException):
    pass


class ModelSpecError(PerspectiveKitException):
    pass


ModelSpec = namedtuple('ModelSpec', ['main_terms', 'interaction_terms', 'include_intercept'])

AnovaRow = namedtuple('AnovaRow', ['term', 'df', 'sum_sq', 'mean_sq', 'f_value', 'p_value', 'signif'])
ResidualRow = namedtuple('ResidualRow', ['df', 'sum_sq', 'mean_sq'])
RegressionSummary = namedtuple('RegressionSummary', [
    'n', 'k', 'ss_t', 'ms_t', 'ss_r', 'ms_r', 'f_value', 'p_value', 'df_model', 'df_resid', 'r_squared'])
AnovaTable = namedtuple('AnovaTable', ['rows', 'residual', 'ss_t', 'n', 'summary'])

Coefficient = namedtuple('Coefficient', ['term', 'estimate', 'std_error', 't_value', 'p_value'])
FitDiagnostics = namedtuple('FitDiagnostics', ['coefficients', 'residuals', 'sigma2_hat', 'fitted'])
FitDiagnostics.__new__.__defaults__ = (None,)

QQPoint = namedtuple('QQPoint', ['theoretical', 'sample'])


def interaction_name(pair):
    return ':'.join(pair)


def model_spec(main_terms=ATTRIBUTES, interaction_terms=(), include_intercept=True, valid_terms=ATTRIBUTES):
    """
    Validated ModelSpec.

    interaction_terms are (a, b) pairs or "A:B" strings; both factors must be main terms.
    valid_terms=None accepts any main term name.
    """
    main_terms = tuple(main_terms)
    if not main_terms:
        raise ModelSpecError('model needs at least one main term')
    if len(set(main_terms)) != len(main_terms):
        raise ModelSpecError('duplicate main terms in ' + ', '.join(main_terms))
    if valid_terms is not None:
        unknown = [t for t in main_terms if t not in valid_terms]
        if unknown:
            raise ModelSpecError('unknown term(s) {}; valid names are {}'.format(
                ', '.join(unknown), ', '.join(valid_terms)))

    pairs = []
    for term in interaction_terms:
        pair = tuple(term.split(':')) if isinstance(term, str) else tuple(term)
        if len(pair) != 2:
            raise ModelSpecError('interaction {!r} must name exactly two terms'.format(term))
        missing = [f for f in pair if f not in main_terms]
        if missing:
            raise ModelSpecError('interaction {} uses {} which is not a main term'.format(
                interaction_name(pair), ', '.join(missing)))
        if pair in pairs:
            raise ModelSpecError('duplicate interaction ' + interaction_name(pair))
        pairs.append(pair)
    return ModelSpec(main_terms=main_terms, interaction_terms=tuple(pairs), include_intercept=bool(include_intercept))


def term_names(spec):
    return list(spec.main_terms) + [interaction_name(p) for p in spec.interaction_terms]


def design_columns(features, feature_names, spec):
    """Predictor columns in model order: main terms, then interaction products."""
    features = np.asarray(features, dtype=np.float64)
    index = {name: i for i, name in enumerate(feature_names)}
    columns = [features[:, index[t]] for t in spec.main_terms]
    columns += [features[:, index[a]] * features[:, index[b]] for a, b in spec.interaction_terms]
    return np.column_stack(columns)


def signif_code(p_value):
    for threshold, code in SIGNIF_THRESHOLDS:
        if p_value <= threshold:
            return code
    return ''


def _regression_ss(fitted, center):
    return float(np.sum((fitted - center) ** 2))


def sequential_anova(X, y, terms, include_intercept=True):
    """
    Type-I ANOVA of y on the columns of X, entered left to right.

    Returns (AnovaTable, FitDiagnostics). Raises InsufficientDataError when n <= k + 1,
    RankDeficiencyError naming the offending term and DegenerateFitError on a perfect fit.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    n, k = X.shape
    terms = list(terms)
    if len(terms) != k:
        raise ModelSpecError('{} term names for {} columns'.format(len(terms), k))
    offset = 1 if include_intercept else 0
    df_resid = n - k - offset
    if df_resid < 1:
        raise InsufficientDataError('need more than {} rows for {} terms, got {}'.format(k + offset, k, n))

    design = np.column_stack([np.ones(n), X]) if include_intercept else X
    names = (['(Intercept)'] if include_intercept else []) + terms
    try:
        full = least_squares(design, y)
    except RankDeficiencyError as e:
        raise RankDeficiencyError(e.column, e.rank, design.shape[1], name=names[e.column])

    center = float(y.mean()) if include_intercept else 0.0
    ss_t = float(np.sum((y - center) ** 2))
    residuals = y - full.fitted
    ss_e = float(np.sum(residuals ** 2))
    if ss_e == 0.0 or ss_e <= DEGENERATE_RTOL * ss_t:
        raise DegenerateFitError('the model fits exactly (SS_E = {!r}); F is undefined'.format(ss_e))
    ms_e = ss_e / df_resid

    rows = []
    previous = 0.0
    for i, term in enumerate(terms):
        fitted = full.fitted if i == k - 1 else least_squares(design[:, :offset + i + 1], y).fitted
        ss_r = _regression_ss(fitted, center)
        sum_sq = max(ss_r - previous, 0.0)
        previous = ss_r
        f_value = sum_sq / ms_e
        p_value = f_sf(f_value, 1, df_resid)
        rows.append(AnovaRow(term, 1, sum_sq, sum_sq, f_value, p_value, signif_code(p_value)))

    ss_r = sum(r.sum_sq for r in rows)
    if abs(ss_r + ss_e - ss_t) > DECOMPOSITION_RTOL * ss_t:
        raise DegenerateFitError('sum of squares decomposition failed: {!r} + {!r} != {!r}'.format(ss_r, ss_e, ss_t))

    ms_r = ss_r / k
    f_overall = ms_r / ms_e
    summary = RegressionSummary(
        n=n, k=k,
        ss_t=ss_t, ms_t=ss_t / (n - 1) if n > 1 else float('nan'),
        ss_r=ss_r, ms_r=ms_r,
        f_value=f_overall, p_value=f_sf(f_overall, k, df_resid),
        df_model=k, df_resid=df_resid,
        r_squared=ss_r / ss_t if ss_t > 0 else 0.0,
    )
    table = AnovaTable(rows=rows, residual=ResidualRow(df_resid, ss_e, ms_e), ss_t=ss_t, n=n, summary=summary)

    std_errors = np.sqrt(np.clip(np.diag(full.cov_unscaled), 0.0, None) * ms_e)
    coefficients = []
    for name, estimate, se in zip(names, full.beta, std_errors):
        t_value = estimate / se if se > 0 else float('inf')
        coefficients.append(Coefficient(name, float(estimate), float(se), float(t_value), f_sf(t_value ** 2, 1, df_resid)))
    diagnostics = FitDiagnostics(coefficients=coefficients, residuals=residuals, sigma2_hat=ms_e, fitted=full.fitted)
    return table, diagnostics


def anova(dataset, spec):
    """Fit label ~ scores (+ interactions) on a LabeledDataset."""
    spec = model_spec(spec.main_terms, spec.interaction_terms, spec.include_intercept, valid_terms=dataset.feature_names)
    X = design_columns(dataset.features, dataset.feature_names, spec)
    table, diagnostics = sequential_anova(X, dataset.labels.astype(np.float64), term_names(spec), spec.include_intercept)
    log.info('fitted ANOVA on %s: n=%d, %d terms, R^2=%.4f' % (dataset.name, table.n, len(table.rows), table.summary.r_squared))
    return table, diagnostics


def significance_vector(table, dataset=None):
    if not table.rows:
        raise ModelSpecError('table has no term rows')
    return SignificanceVector(
        terms=tuple(r.term for r in table.rows),
        values=tuple(max(r.p_value, P_FLOOR) for r in table.rows),
        dataset=dataset,
    )


def qq_data(diagnostics):
    """
    Normal Q-Q points: sorted standardized residuals against probit((i - 0.5)/n).
    """
    residuals = np.sort(np.asarray(diagnostics.residuals, dtype=np.float64))
    n = len(residuals)
    if n < 3:
        raise InsufficientDataError('Q-Q data needs at least 3 residuals, got {}'.format(n))
    if not diagnostics.sigma2_hat > 0:
        raise DegenerateFitError('MS_E is {!r}; residuals cannot be standardized'.format(diagnostics.sigma2_hat))
    scale = math.sqrt(diagnostics.sigma2_hat)
    return [QQPoint(probit((i - 0.5) / n), float(r) / scale) for i, r in enumerate(residuals, start=1)]


def _format_p(p_value):
    if p_value < 1e-4:
        return '{:.3g}'.format(p_value).replace('e-0', 'e-')
    return '{:.4f}'.format(p_value)


def _align(lines):
    widths = [max(len(line[i]) for line in lines) for i in range(len(lines[0]))]
    out = []
    for line in lines:
        cells = [line[0].ljust(widths[0])] + [cell.rjust(w) for cell, w in zip(line[1:-1], widths[1:-1])]
        cells.append(line[-1].ljust(widths[-1]))
        out.append(' '.join(cells).rstrip())
    return out


def render_text(table, diagnostics=None):
    lines = [['', 'Df', 'Sum Sq', 'Mean Sq', 'F value', 'Pr(>F)', '']]
    for r in table.rows:
        lines.append([r.term, str(r.df), '{:.4f}'.format(r.sum_sq), '{:.4f}'.format(r.mean_sq),
                      '{:.4f}'.format(r.f_value), _format_p(r.p_value), r.signif])
    res = table.residual
    lines.append(['Residuals', str(res.df), '{:.4f}'.format(res.sum_sq), '{:.4f}'.format(res.mean_sq), '', '', ''])
    out = _align(lines)
    out += ['---', SIGNIF_LEGEND, '']

    s = table.summary
    out.append('Total Sum Sq: {:.4f} on {} DF, Mean Sq: {:.4f}'.format(s.ss_t, s.n - 1, s.ms_t))
    out.append('Regression Sum Sq: {:.4f}, Mean Sq: {:.4f}'.format(s.ss_r, s.ms_r))
    out.append('F-statistic: {:.4f} on {} and {} DF, p-value: {}'.format(s.f_value, s.df_model, s.df_resid, _format_p(s.p_value)))
    out.append('Multiple R-squared: {:.4f}'.format(s.r_squared))

    if diagnostics is not None:
        out += ['', 'Coefficients:']
        coef = [['', 'Estimate', 'Std. Error', 't value', 'Pr(>|t|)', '']]
        for c in diagnostics.coefficients:
            coef.append([c.term, '{:.6f}'.format(c.estimate), '{:.6f}'.format(c.std_error),
                         '{:.4f}'.format(c.t_value), _format_p(c.p_value), signif_code(c.p_value)])
        out += _align(coef)
    return '\n'.join(out) + '\n'


def to_document(table, diagnostics=None):
    document = {
        'terms': [r._asdict() for r in table.rows],
        'residual': table.residual._asdict(),
        'summary': table.summary._asdict(),
    }
    if diagnostics is not None:
        document['coefficients'] = [c._asdict() for c in diagnostics.coefficients]
    return document


def render_json(table, diagnostics=None):
    return json.dumps(to_document(table, diagnostics), indent=4, sort_keys=True) + '\n'
