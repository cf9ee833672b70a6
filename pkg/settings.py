"""Contains the SettingsManager class instances"""
import os
import json

from typing import Any, Dict, List, Tuple


class EstimationSettings:
    """EM estimation settings class"""

    def __init__(self, estimation_dict: Dict[str, Any]) -> None:
        self.max_iterations: int = int(estimation_dict["max_iterations"])
        self.absolute_tolerance: float = float(estimation_dict["absolute_tolerance"])
        self.relative_tolerance: float = float(estimation_dict["relative_tolerance"])
        self.gradient_tolerance: float = float(estimation_dict["gradient_tolerance"])
        self.score_tolerance: float = float(estimation_dict["score_tolerance"])
        self.polish_max_iterations: int = int(estimation_dict["polish_max_iterations"])
        self.newton_tolerance: float = float(estimation_dict["newton_tolerance"])
        self.newton_max_iterations: int = int(
            estimation_dict["newton_max_iterations"]
        )
        self.parameter_bound: float = float(estimation_dict["parameter_bound"])
        low, high = estimation_dict["start_probability_bounds"]
        self.start_probability_bounds: Tuple[float, float] = (float(low), float(high))
        self.start_main_effect: float = float(estimation_dict["start_main_effect"])
        self.restarts: int = int(estimation_dict["restarts"])
        self.jitter: float = float(estimation_dict["jitter"])
        self.seed: int = int(estimation_dict["seed"])
        self.class_floor: float = float(estimation_dict["class_floor"])

    def as_dict(self) -> Dict[str, Any]:
        """Represents the class instance as dict

        Returns:
            dict
        """
        return {
            "max_iterations": self.max_iterations,
            "absolute_tolerance": self.absolute_tolerance,
            "relative_tolerance": self.relative_tolerance,
            "gradient_tolerance": self.gradient_tolerance,
            "score_tolerance": self.score_tolerance,
            "polish_max_iterations": self.polish_max_iterations,
            "newton_tolerance": self.newton_tolerance,
            "newton_max_iterations": self.newton_max_iterations,
            "parameter_bound": self.parameter_bound,
            "start_probability_bounds": list(self.start_probability_bounds),
            "start_main_effect": self.start_main_effect,
            "restarts": self.restarts,
            "jitter": self.jitter,
            "seed": self.seed,
            "class_floor": self.class_floor,
        }


class ScoreSettings:
    """Score engine settings class"""

    def __init__(self, score_dict: Dict[str, Any]) -> None:
        self.monotonicity_tolerance: float = float(
            score_dict["monotonicity_tolerance"]
        )
        self.ridge_condition: float = float(score_dict["ridge_condition"])
        self.ridge_scale: float = float(score_dict["ridge_scale"])
        self.unavailable_eigenvalue: float = float(
            score_dict["unavailable_eigenvalue"]
        )
        self.max_attributes: int = int(score_dict["max_attributes"])

    def as_dict(self) -> Dict[str, Any]:
        """Represents the class instance as dict

        Returns:
            dict
        """
        return {
            "monotonicity_tolerance": self.monotonicity_tolerance,
            "ridge_condition": self.ridge_condition,
            "ridge_scale": self.ridge_scale,
            "unavailable_eigenvalue": self.unavailable_eigenvalue,
            "max_attributes": self.max_attributes,
        }


class ModIndicesSettings:
    """Modification indices settings class"""

    def __init__(self, mod_indices_dict: Dict[str, Any]) -> None:
        self.max_order: int = int(mod_indices_dict["max_order"])
        self.alpha: float = float(mod_indices_dict["alpha"])

    def as_dict(self) -> Dict[str, Any]:
        """Represents the class instance as dict

        Returns:
            dict
        """
        return {"max_order": self.max_order, "alpha": self.alpha}


class SimulationSettings:
    """Simulation design defaults class"""

    def __init__(self, simulation_dict: Dict[str, Any]) -> None:
        self.items: int = int(simulation_dict["items"])
        self.attributes: int = int(simulation_dict["attributes"])
        self.tetrachoric_rho: float = float(simulation_dict["tetrachoric_rho"])
        self.q_pattern: List[str] = list(simulation_dict["q_pattern"])
        self.p_nonmaster: float = float(simulation_dict["p_nonmaster"])
        self.p_master: Dict[str, float] = {
            key: float(value) for key, value in simulation_dict["p_master"].items()
        }
        self.split_rule: str = simulation_dict["split_rule"]
        self.examinees: int = int(simulation_dict["examinees"])
        self.replications: int = int(simulation_dict["replications"])
        self.seed: int = int(simulation_dict["seed"])
        self.exclusion_flag_fraction: float = float(
            simulation_dict["exclusion_flag_fraction"]
        )
        self.alphas: Dict[str, List[float]] = {
            key: [float(alpha) for alpha in value]
            for key, value in simulation_dict["alphas"].items()
        }
        self.sample_sizes: List[int] = [
            int(size) for size in simulation_dict["sample_sizes"]
        ]

    def as_dict(self) -> Dict[str, Any]:
        """Represents the class instance as dict

        Returns:
            dict
        """
        return {
            "items": self.items,
            "attributes": self.attributes,
            "tetrachoric_rho": self.tetrachoric_rho,
            "q_pattern": list(self.q_pattern),
            "p_nonmaster": self.p_nonmaster,
            "p_master": dict(self.p_master),
            "split_rule": self.split_rule,
            "examinees": self.examinees,
            "replications": self.replications,
            "seed": self.seed,
            "exclusion_flag_fraction": self.exclusion_flag_fraction,
            "alphas": {key: list(value) for key, value in self.alphas.items()},
            "sample_sizes": list(self.sample_sizes),
        }


class RuntimeSettings:
    """Process-level settings class"""

    def __init__(self, runtime_dict: Dict[str, Any]) -> None:
        self.threads_variable: str = runtime_dict["threads_variable"]
        self.timezone: str = runtime_dict["timezone"]

    def as_dict(self) -> Dict[str, Any]:
        """Represents the class instance as dict

        Returns:
            dict
        """
        return {"threads_variable": self.threads_variable, "timezone": self.timezone}


class SettingsManager:
    """Application settings manager"""

    def _pack_estimation(self):
        self.estimation = EstimationSettings(self._settings["estimation"])

    def _pack_score(self):
        self.score = ScoreSettings(self._settings["score"])

    def _pack_mod_indices(self):
        self.mod_indices = ModIndicesSettings(self._settings["mod_indices"])

    def _pack_simulation(self):
        self.simulation = SimulationSettings(self._settings["simulation"])

    def _pack_runtime(self):
        self.runtime = RuntimeSettings(self._settings["runtime"])

    def _load_settings(self):
        with open(self._path, encoding="utf8") as json_file:
            self._settings: Dict[str, Any] = json.load(json_file)

    def __str__(self) -> str:
        return str(list(self._settings.items()))

    def __repr__(self) -> str:
        return str(list(self._settings.items()))

    def __init__(
        self,
        path: str = os.path.join(
            os.path.dirname(os.path.abspath(__file__)), "settings.json"
        ),
    ) -> None:
        self._path = path
        self._load_settings()

        self.version: str = self._settings["version"]
        self._pack_estimation()
        self._pack_score()
        self._pack_mod_indices()
        self._pack_simulation()
        self._pack_runtime()


SETTINGS_MANAGER = SettingsManager()
