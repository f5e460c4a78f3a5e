from .dfm import DfmFit, dfm_nowcast, extract_factors, fit_dfm, fit_var1
from .linear import LinearFit, fit_enet, fit_ols, predict_linear
from .mlp import MlpParams, fit_mlp, grad_check
from .registry import FittedModel, ModelSpec, make_spec
from .svr import fit_svr
from .trees import Ensemble, RegressionTree, fit_gbr, fit_rfr, fit_tree, predict_ensemble

__all__ = [
    "DfmFit",
    "Ensemble",
    "FittedModel",
    "LinearFit",
    "MlpParams",
    "ModelSpec",
    "RegressionTree",
    "dfm_nowcast",
    "extract_factors",
    "fit_dfm",
    "fit_enet",
    "fit_gbr",
    "fit_mlp",
    "fit_ols",
    "fit_rfr",
    "fit_svr",
    "fit_tree",
    "fit_var1",
    "grad_check",
    "make_spec",
    "predict_ensemble",
    "predict_linear",
]
