#pragma once

namespace confsense::registry {

/// Canonical registry of reviewed sensitivity-analysis methods, shipped as
/// versioned data (also on disk as data/method_registry.json). Edits here are
/// data patches; the loader validates structure and id uniqueness.
inline constexpr char kBuiltinRegistryJson[] = R"JSON({
  "version": 1,
  "methods": [
    {
      "id": "manski",
      "citation": "Robins (1989); Manski (1990)",
      "year": 1990,
      "estimands": ["ACE", "RD"],
      "outcome_types": ["binary"],
      "confounder_position": "treatment-outcome",
      "parameters": {
        "count": 0,
        "description": "parameter-free worst-case bounds from the observed arm rates",
        "metric": "none"
      },
      "functional_class": "assumption-free",
      "covariate_adjustment": true,
      "distribution_assumption_on_u": false,
      "implemented_here": true
    },
    {
      "id": "ovb",
      "citation": "Cinelli, Kumor, Chen, Pearl & Bareinboim (2019); Cinelli & Hazlett (2020); Cinelli, Ferwerda & Hazlett (2020)",
      "year": 2020,
      "estimands": ["ACE"],
      "outcome_types": ["continuous"],
      "confounder_position": "treatment-outcome",
      "parameters": {
        "count": 2,
        "description": "partial R2 of the confounder with the outcome and with the treatment",
        "metric": "partial-R2"
      },
      "functional_class": "parametric-linear",
      "covariate_adjustment": true,
      "distribution_assumption_on_u": false,
      "implemented_here": true
    },
    {
      "id": "imbens-2003",
      "citation": "Imbens (2003)",
      "year": 2003,
      "estimands": ["ACE"],
      "outcome_types": ["continuous"],
      "confounder_position": "treatment-outcome",
      "parameters": {
        "count": 2,
        "description": "partial R2 of a binary confounder with the outcome and the treatment",
        "metric": "partial-R2"
      },
      "functional_class": "parametric-linear",
      "covariate_adjustment": true,
      "distribution_assumption_on_u": true,
      "implemented_here": false
    },
    {
      "id": "austen-plots",
      "citation": "Veitch & Zaveri (2020)",
      "year": 2020,
      "estimands": ["ACE"],
      "outcome_types": ["any"],
      "confounder_position": "treatment-outcome",
      "parameters": {
        "count": 2,
        "description": "partial variation of the confounder in the outcome and in the exposure",
        "metric": "partial-R2"
      },
      "functional_class": "parametric-nonlinear",
      "covariate_adjustment": true,
      "distribution_assumption_on_u": false,
      "implemented_here": false
    },
    {
      "id": "zhang-tchetgen-2022",
      "citation": "Zhang & Tchetgen Tchetgen (2022)",
      "year": 2022,
      "estimands": ["ACE"],
      "outcome_types": ["any"],
      "confounder_position": "treatment-outcome",
      "parameters": {
        "count": 2,
        "description": "coefficients of the unobserved confounder in the semiparametric model",
        "metric": "coefficient"
      },
      "functional_class": "semiparametric",
      "covariate_adjustment": true,
      "distribution_assumption_on_u": false,
      "implemented_here": false
    },
    {
      "id": "copsens-2021",
      "citation": "Zheng, D'Amour & Franks (2021)",
      "year": 2021,
      "estimands": ["multi-treatment"],
      "outcome_types": ["continuous"],
      "confounder_position": "treatment-outcome",
      "parameters": {
        "count": 1,
        "description": "Gaussian-copula dependence between the treatments and the confounder",
        "metric": "correlation"
      },
      "functional_class": "parametric-linear",
      "covariate_adjustment": true,
      "distribution_assumption_on_u": true,
      "implemented_here": false
    },
    {
      "id": "zheng-2022",
      "citation": "Zheng, D'Amour & Franks (2022)",
      "year": 2022,
      "estimands": ["multi-treatment"],
      "outcome_types": ["continuous"],
      "confounder_position": "treatment-outcome",
      "parameters": {
        "count": 1,
        "description": "partial variance between the confounder and the treatments",
        "metric": "partial-R2"
      },
      "functional_class": "semiparametric",
      "covariate_adjustment": true,
      "distribution_assumption_on_u": true,
      "implemented_here": false
    },
    {
      "id": "tukey-sens",
      "citation": "Franks, D'Amour & Feller (2020)",
      "year": 2020,
      "estimands": ["ACE"],
      "outcome_types": ["any"],
      "confounder_position": "treatment-outcome",
      "parameters": {
        "count": 2,
        "description": "how binary treatment assignment depends marginally on each potential outcome",
        "metric": "coefficient"
      },
      "functional_class": "semiparametric",
      "covariate_adjustment": true,
      "distribution_assumption_on_u": false,
      "implemented_here": false
    },
    {
      "id": "pena-2022",
      "citation": "Peña (2022)",
      "year": 2022,
      "estimands": ["ACE", "RD"],
      "outcome_types": ["binary"],
      "confounder_position": "treatment-outcome",
      "parameters": {
        "count": 2,
        "description": "maximum and minimum conditional outcome probability given treatment and confounder",
        "metric": "probability"
      },
      "functional_class": "nonparametric",
      "covariate_adjustment": false,
      "distribution_assumption_on_u": false,
      "implemented_here": false
    },
    {
      "id": "sjolander-hossjer-2021",
      "citation": "Sjölander & Hössjer (2021)",
      "year": 2021,
      "estimands": ["RD", "ACE"],
      "outcome_types": ["binary"],
      "confounder_position": "treatment-outcome",
      "parameters": {
        "count": 3,
        "description": "differences in conditional probabilities of exposure and outcome induced by the confounder",
        "metric": "probability"
      },
      "functional_class": "nonparametric",
      "covariate_adjustment": false,
      "distribution_assumption_on_u": false,
      "implemented_here": false
    },
    {
      "id": "rho-gnf",
      "citation": "Balgi, Peña & Daoud (2022)",
      "year": 2022,
      "estimands": ["ACE", "CACE", "NDE", "NIE"],
      "outcome_types": ["any"],
      "confounder_position": "treatment-outcome",
      "parameters": {
        "count": 1,
        "description": "Gaussian-copula correlation between the treatment latent and the outcome noise",
        "metric": "correlation"
      },
      "functional_class": "parametric-nonlinear",
      "covariate_adjustment": true,
      "distribution_assumption_on_u": false,
      "implemented_here": false
    },
    {
      "id": "copula-rho",
      "citation": "Balgi, Peña & Daoud (2022); closed-form linear-Gaussian analogue",
      "year": 2022,
      "estimands": ["ACE"],
      "outcome_types": ["continuous"],
      "confounder_position": "treatment-outcome",
      "parameters": {
        "count": 1,
        "description": "Gaussian-copula correlation between the treatment latent index and the outcome noise",
        "metric": "correlation"
      },
      "functional_class": "parametric-linear",
      "covariate_adjustment": false,
      "distribution_assumption_on_u": false,
      "implemented_here": true
    },
    {
      "id": "greenland-1996",
      "citation": "Greenland (1996)",
      "year": 1996,
      "estimands": ["OR", "RR"],
      "outcome_types": ["binary"],
      "confounder_position": "treatment-outcome",
      "parameters": {
        "count": 4,
        "description": "prevalence ratio and odds ratios linking the confounder to treatment and outcome",
        "metric": "odds-ratio"
      },
      "functional_class": "nonparametric",
      "covariate_adjustment": false,
      "distribution_assumption_on_u": false,
      "implemented_here": false
    },
    {
      "id": "evalue",
      "citation": "Ding & VanderWeele (2016); VanderWeele & Ding (2017)",
      "year": 2017,
      "estimands": ["RR", "OR", "RD"],
      "outcome_types": ["any"],
      "confounder_position": "treatment-outcome",
      "parameters": {
        "count": 2,
        "description": "risk-ratio pair linking the confounder to the exposure and to the outcome",
        "metric": "risk-ratio"
      },
      "functional_class": "nonparametric",
      "covariate_adjustment": true,
      "distribution_assumption_on_u": false,
      "implemented_here": true
    },
    {
      "id": "mediation-rho",
      "citation": "Imai, Keele & Tingley (2010); Imai, Keele & Yamamoto (2010)",
      "year": 2010,
      "estimands": ["NDE", "NIE"],
      "outcome_types": ["continuous"],
      "confounder_position": "mediator-outcome",
      "parameters": {
        "count": 1,
        "description": "correlation between the mediator-equation and outcome-equation errors",
        "metric": "correlation"
      },
      "functional_class": "parametric-linear",
      "covariate_adjustment": true,
      "distribution_assumption_on_u": false,
      "implemented_here": true
    },
    {
      "id": "tchetgen-shpitser-2012",
      "citation": "Tchetgen Tchetgen & Shpitser (2012)",
      "year": 2012,
      "estimands": ["NDE", "NIE"],
      "outcome_types": ["continuous"],
      "confounder_position": "mediator-outcome",
      "parameters": {
        "count": 1,
        "description": "selection-bias function lambda for mediator-outcome confounding",
        "metric": "coefficient"
      },
      "functional_class": "semiparametric",
      "covariate_adjustment": true,
      "distribution_assumption_on_u": false,
      "implemented_here": false
    },
    {
      "id": "vanderweele-2010",
      "citation": "VanderWeele (2010)",
      "year": 2010,
      "estimands": ["NDE", "NIE"],
      "outcome_types": ["any"],
      "confounder_position": "mediator-outcome",
      "parameters": {
        "count": 2,
        "description": "outcome-mean shift gamma by confounder level and confounder prevalence contrast given the mediator",
        "metric": "coefficient"
      },
      "functional_class": "parametric-linear",
      "covariate_adjustment": true,
      "distribution_assumption_on_u": false,
      "implemented_here": false
    },
    {
      "id": "vanderweele-interaction-2012",
      "citation": "VanderWeele, Mukherjee & Chen (2012)",
      "year": 2012,
      "estimands": ["RR", "RD"],
      "outcome_types": ["binary"],
      "confounder_position": "treatment-outcome",
      "parameters": {
        "count": 2,
        "description": "confounder-outcome association within joint treatment levels and confounder prevalence contrast",
        "metric": "risk-ratio"
      },
      "functional_class": "parametric-linear",
      "covariate_adjustment": true,
      "distribution_assumption_on_u": false,
      "implemented_here": false
    },
    {
      "id": "ivmodel-kang-2021",
      "citation": "Kang, Jiang, Zhao & Small (2021)",
      "year": 2021,
      "estimands": ["LATE", "ACE"],
      "outcome_types": ["continuous"],
      "confounder_position": "instrument-outcome",
      "parameters": {
        "count": 1,
        "description": "violation magnitude of the instrument's exclusion restriction",
        "metric": "coefficient"
      },
      "functional_class": "parametric-linear",
      "covariate_adjustment": true,
      "distribution_assumption_on_u": false,
      "implemented_here": false
    },
    {
      "id": "iv-ovb-2022",
      "citation": "Cinelli & Hazlett (2022)",
      "year": 2022,
      "estimands": ["LATE", "ACE"],
      "outcome_types": ["continuous"],
      "confounder_position": "instrument-outcome",
      "parameters": {
        "count": 2,
        "description": "partial R2 of the confounder with the instrument and with the outcome",
        "metric": "partial-R2"
      },
      "functional_class": "parametric-linear",
      "covariate_adjustment": true,
      "distribution_assumption_on_u": false,
      "implemented_here": false
    },
    {
      "id": "bias-formula",
      "citation": "VanderWeele & Arah (2011)",
      "year": 2011,
      "estimands": ["ACE", "RD"],
      "outcome_types": ["any"],
      "confounder_position": "treatment-outcome",
      "parameters": {
        "count": 2,
        "description": "confounder-outcome mean contrasts and confounder prevalence per stratum",
        "metric": "coefficient"
      },
      "functional_class": "nonparametric",
      "covariate_adjustment": true,
      "distribution_assumption_on_u": false,
      "implemented_here": true
    }
  ]
}
)JSON";

} // namespace confsense::registry
