"""
Plain-text consistency report rendered with jinja2.
"""

from jinja2 import Environment, StrictUndefined

from src.models.estimation import ConsistencyReport, FitResult, MeasuredValues

REPORT_TEMPLATE = """\
coherent-flow consistency report
================================

Fitted parameters (gamma_p fixed at {{ "%.4f"|format(fit.gamma_p) }} MHz)
  eta_gamma = {{ "%+.4f"|format(fit.eta_gamma) }} MHz  (+/- {{ "%.2g"|format(fit.covariance_proxy.get("eta_gamma", 0.0)) }})
  mu        = {{ "%.4f"|format(fit.mu) }}       (+/- {{ "%.2g"|format(fit.covariance_proxy.get("mu", 0.0)) }})
  k1        = {{ "%.4f"|format(fit.k1) }} MHz   (+/- {{ "%.2g"|format(fit.covariance_proxy.get("k1", 0.0)) }})
  k4        = {{ "%.4f"|format(fit.k4) }} MHz   (+/- {{ "%.2g"|format(fit.covariance_proxy.get("k4", 0.0)) }})
  RMS residual = {{ "%.3e"|format(fit.residual) }}{% if fit.symmetric_couplers %}  [k1 = k4 constrained]{% endif %}

{% if fit.warnings %}
Fit warnings
{% for warning in fit.warnings %}
  - {{ warning }}
{% endfor %}

{% endif %}
Measurements: gamma_p = {{ measured.gamma_p }} MHz, gamma_c = {{ measured.gamma_c }} MHz, \
witness t^2 = {{ measured.witness_t_sq }}, mu bound = {{ measured.mu_bound }}

Checks
{% for check in report.checks %}
  [{{ "PASS" if check.passed else "FAIL" }}] {{ "%-14s"|format(check.name) }} {{ check.message }}
{% endfor %}

Result: {{ "all checks passed" if report.all_passed else "inconsistent with measurements" }}
"""

_environment = Environment(
    trim_blocks=True,
    lstrip_blocks=True,
    keep_trailing_newline=True,
    undefined=StrictUndefined,
    autoescape=False,
)


def render_report(
    fit: FitResult,
    measured: MeasuredValues,
    report: ConsistencyReport,
) -> str:
    """Render the consistency report as text."""
    template = _environment.from_string(REPORT_TEMPLATE)
    return template.render(fit=fit, measured=measured, report=report)
