# src/reporters/scenario_reporter.py
import asyncio
import logging
import math
from pathlib import Path
from typing import Callable, Dict, List

import numpy as np

from ..core.config import ScenarioConfig
from ..core.exceptions import ConvergenceError, QeosimError, ToleranceError, ValidationError
from ..models.entities import CoherentState, SidebandVector
from ..simulators import constellation as const
from ..simulators import physics, qstate, sideband
from ..utils.provenance import provenance
from ..utils.visualizer import ScenarioVisualizer
from .artifact_writer import ArtifactWriter

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_TOLERANCE = 3

SUBCOMMANDS = ("design", "width-sweep", "matrix-verify", "ode-verify", "encode", "ser", "report")

ENCODE_COLUMNS = ["symbol_index", "b_deg", "theta_rad", "mean_x", "mean_p", "x", "p"]
SWEEP_COLUMNS = ["w_m", "P0", "P1", "P2", "tail"]
ODE_FOCK_INDICES = (1, 2, 3, 4, 5)


def _sample_times(period: float) -> List[float]:
    return [0.0, period / 8.0, period / 3.0]


def _photon_tag(n_ph: float) -> str:
    return f"{n_ph:g}".replace(".", "p")


class ScenarioReporter:
    """Runs one subcommand against a validated scenario and writes its artifacts."""

    def __init__(self, config: ScenarioConfig, out_dir: Path, plot: bool = False, n_override: int = None):
        self.config = config
        self.out_dir = Path(out_dir)
        self.plot = plot
        self.n_override = n_override

    def run(self, name: str) -> int:
        runners: Dict[str, Callable[[ArtifactWriter], int]] = {
            "design": self._run_design,
            "width-sweep": self._run_width_sweep,
            "matrix-verify": self._run_matrix_verify,
            "ode-verify": self._run_ode_verify,
            "encode": self._run_encode,
            "ser": self._run_ser,
        }
        if name == "report":
            return asyncio.run(self.generate_report())
        if name not in runners:
            raise ValidationError("subcommand", f"unknown subcommand {name!r}")
        writer = ArtifactWriter(self.out_dir, provenance(self.config.resolved(), name))
        try:
            status = runners[name](writer)
        except ToleranceError as exc:
            # the verification report is complete and stays on disk
            logger.error("%s: %s", name, exc)
            return EXIT_TOLERANCE
        except ConvergenceError as exc:
            logger.error("%s failed: %s", name, exc)
            writer.rollback()
            return EXIT_TOLERANCE
        except QeosimError as exc:
            logger.error("%s rejected: %s", name, exc)
            writer.rollback()
            return EXIT_VALIDATION
        except Exception:
            writer.rollback()
            raise
        logger.info("%s finished with status %d", name, status)
        return status

    async def generate_report(self) -> int:
        """Every subcommand concurrently, each into its own sub-directory."""
        sections = [name for name in SUBCOMMANDS if name != "report"]

        async def run_section(name: str) -> int:
            reporter = ScenarioReporter(self.config, self.out_dir / name, self.plot, self.n_override)
            return await asyncio.to_thread(reporter.run, name)

        statuses = await asyncio.gather(*[run_section(name) for name in sections])
        summary = dict(zip(sections, statuses))
        writer = ArtifactWriter(self.out_dir, provenance(self.config.resolved(), "report"))
        writer.write_json("report.json", {"sections": summary})
        return max(statuses)

    def _run_design(self, writer: ArtifactWriter) -> int:
        design = self.config.design()
        mat, car, geo, drive = design.material, design.carriers, design.geometry, design.drive
        depth = physics.design_depth(design)
        t_w, t_d, transit = physics.transit_times(mat, car, geo)
        per_count = []
        for count in self.config.geometry.element_counts:
            counted = design.with_geometry(N=count)
            delta_theta_n, phi_n = physics.array_modulation_depth(mat, car, counted.geometry, drive)
            S = self.config.numerics.S or sideband.design_truncation(counted)
            per_count.append({"N": count, "delta_theta_N": delta_theta_n, "phi_N": phi_n,
                              "abs_delta_theta_N": abs(delta_theta_n), "S": S,
                              "truncation_tail": sideband.bessel_tail(S, abs(delta_theta_n))})
        network = sideband.array_network(design)
        writer.write_json("design.json", {
            "optimum": {
                "W_o_m": physics.optimum_element_width(mat, car),
                "D_o_m": physics.optimum_array_periodicity(mat, car),
                "is_optimum": physics.is_optimum(design),
            },
            "geometry": {"W_m": geo.W, "D_m": geo.D, "G_m": geo.G, "N": geo.N, "gamma": geo.gamma},
            "carriers": {
                "omega_w_rad_s": car.omega_w,
                "omega_op_rad_s": car.omega_op,
                "k_op_rad_m": design.k_op,
                "frequency_ratio": car.omega_op / car.omega_w,
            },
            "depth": {
                "delta_theta": depth.delta_theta,
                "abs_delta_theta": abs(depth.delta_theta),
                "phi": depth.phi,
                "delta_theta_N": depth.delta_theta_N,
                "abs_delta_theta_N": abs(depth.delta_theta_N),
                "phi_N": depth.phi_N,
                "chi": depth.chi,
            },
            "element_counts": per_count,
            "transit_s": {"T_W": t_w, "T_D": t_d, "total": transit},
            "network": [{"node": node, **{k: v for k, v in attrs.items() if v is not None}}
                        for node, attrs in network.nodes(data=True)],
        })
        return EXIT_OK

    def _run_width_sweep(self, writer: ArtifactWriter) -> int:
        design = self.config.design(N=1)
        w_o = physics.optimum_element_width(design.material, design.carriers)
        grid = np.linspace(0.0, 2.0 * w_o, self.config.numerics.sweep_points)
        rows = sideband.width_sweep(design, grid, S=self.config.numerics.S)
        writer.write_csv("width_sweep.csv", SWEEP_COLUMNS,
                         ([row.w, row.P0, row.P1, row.P2, row.tail] for row in rows),
                         notes={"max_truncation_tail": max(abs(row.truncation_tail) for row in rows)})
        if self.plot:
            writer.track(ScenarioVisualizer(writer.out_dir).plot_width_sweep(rows, w_o))
        return EXIT_OK

    def _run_matrix_verify(self, writer: ArtifactWriter) -> int:
        tolerances = self.config.numerics.tolerances
        numerics_S = self.config.numerics.S
        checks: Dict[str, float] = {}

        def record(key: str, value: float):
            checks[key] = max(checks.get(key, 0.0), value)

        reference = self.config.design(N=1)
        split_S = numerics_S or 25
        for t in _sample_times(reference.carriers.period_w):
            for key, value in sideband.split_section_relations(reference, t, split_S).items():
                record(key, value)

        per_count = []
        for count in self.config.geometry.element_counts:
            design = self.config.design(N=count)
            b = design.drive.b
            array_S = numerics_S or sideband.design_truncation(design)
            rep_S = array_S + 4
            depth = physics.design_depth(design)
            entry = {
                "N": count,
                "delta_theta_N": depth.delta_theta_N,
                "truncation": {"array": array_S, "representation": rep_S},
                "truncation_tail": sideband.bessel_tail(array_S, abs(depth.delta_theta_N)),
            }
            for t in _sample_times(design.carriers.period_w):
                total = sideband.array_cascade(design, t=t, b=b, S=array_S)
                out = sideband.apply(total, SidebandVector.unit(array_S))
                probs = sideband.sideband_probabilities(out)
                ratio = sideband.reconstruct_phase(out) / sideband.closed_form_amplitude(design, t, b)
                wide = sideband.array_cascade(design, t=t, b=b, S=rep_S)
                worst = max(abs(sideband.array_matrix_element(design, s, p, t, b) - wide.entry(s, p))
                            for s in range(-4, 5) for p in range(-4, 5))
                measured = {
                    "unitarity": sideband.unitarity_defect(total),
                    "probability": abs(probs.total - 1.0),
                    "reconstruction": abs(math.atan2(ratio.imag, ratio.real)),
                    "representation": worst,
                }
                for key, value in measured.items():
                    entry[key] = max(entry.get(key, 0.0), value)
                    record(key, value)
            symbol_error = 0.0
            for b_i in self.config.drive.constellation().phases:
                summed = complex(np.sum(qstate.symbol_sideband_amplitudes(design, b_i).amps))
                theta = physics.modulated_phase(depth, 0.0, b_i)
                symbol_error = max(symbol_error, abs(summed - complex(math.cos(theta), -math.sin(theta))))
            entry["symbol_sideband"] = symbol_error
            record("symbol_sideband", symbol_error)
            logger.debug("matrix-verify N=%d: %s", count, entry)
            per_count.append(entry)

        limits = {
            "cascade_identity": tolerances["identity"],
            "adjoint_relation": tolerances["identity"],
            "inverse_relation": tolerances["identity"],
            "unitarity": tolerances["unitarity"],
            "probability": tolerances["probability"],
            "reconstruction": tolerances["reconstruction"],
            "representation": tolerances["representation"],
            "symbol_sideband": tolerances["reconstruction"],
        }
        failures = {name: checks[name] for name, limit in limits.items() if checks[name] >= limit}
        writer.write_json("matrix_verify.json", {
            "passed": not failures,
            "split_sections": {"S": split_S,
                               "truncation_tail": sideband.bessel_tail(
                                   split_S, abs(physics.design_depth(reference).delta_theta))},
            "checks": {name: {"value": checks[name], "limit": limits[name]} for name in limits},
            "element_counts": per_count,
            "failures": sorted(failures),
        })
        if failures:
            raise ToleranceError(failures)
        return EXIT_OK

    def _run_ode_verify(self, writer: ArtifactWriter) -> int:
        limit = self.config.numerics.tolerances["ode"]
        coherence_limit = self.config.numerics.tolerances["identity"]
        steps = self.config.numerics.steps_per_period
        results = []
        coherence = []
        for count in self.config.geometry.element_counts:
            design = self.config.design(N=count)
            b = design.drive.b
            for t0 in _sample_times(design.carriers.period_w)[:2]:
                for k in ODE_FOCK_INDICES:
                    result = qstate.integrate_amplitude_ode(design, t0, b, k, steps, tolerance=limit)
                    results.append({
                        "N": count,
                        "t0_s": t0,
                        "k": k,
                        "numeric_phase": result.phase,
                        "closed_form_phase": result.closed_form_phase,
                        "error_rad": result.error,
                        "halving_delta_rad": result.halving_delta,
                        "steps": result.steps,
                    })

            # a modulated coherent state must stay the rotated coherent state
            t_check = design.carriers.period_w / 8
            phase = qstate.total_phase(design, t_check, b)
            for n_ph in self.config.state.photon_numbers:
                alpha = CoherentState.from_photon_number(n_ph).alpha
                state = qstate.coherent_fock_amplitudes(alpha, self.config.numerics.K)
                modulated = qstate.modulate_fock_state(state, design, t_check, b)
                rotated = qstate.coherent_fock_amplitudes(alpha * complex(math.cos(phase), -math.sin(phase)), state.K)
                coherence.append({
                    "N": count,
                    "n_ph": n_ph,
                    "K": state.K,
                    "fock_tail": state.tail,
                    "status": state.status,
                    "max_deviation": float(np.max(np.abs(modulated.amps - rotated.amps))),
                })
        worst = max(entry["error_rad"] for entry in results)
        worst_coherence = max(entry["max_deviation"] for entry in coherence)

        failures = {}
        if worst >= limit:
            failures["ode"] = worst
        if worst_coherence >= coherence_limit:
            failures["coherence"] = worst_coherence
        writer.write_json("ode_verify.json", {
            "passed": not failures,
            "limit_rad": limit,
            "max_error_rad": worst,
            "results": results,
            "coherence_limit": coherence_limit,
            "coherence": coherence,
        })
        if failures:
            raise ToleranceError(failures)
        return EXIT_OK

    def _run_encode(self, writer: ArtifactWriter) -> int:
        mc = self.config.mc
        n_samples = self.n_override or mc.n_samples
        constellation = self.config.drive.constellation()
        degrees = self.config.drive.constellation_deg
        visualizer = ScenarioVisualizer(writer.out_dir) if self.plot else None
        for count in self.config.geometry.element_counts:
            design = self.config.design(N=count)
            for n_ph in self.config.state.photon_numbers:
                alpha = CoherentState.from_photon_number(n_ph).alpha
                symbols = const.encode_constellation(constellation, alpha, design)
                clouds = [const.sample_cloud(symbol, n_samples, mc.seed, stream=index)
                          for index, symbol in enumerate(symbols)]
                rows = []
                for index, cloud in enumerate(clouds):
                    symbol = cloud.symbol
                    for x, p in cloud.samples:
                        rows.append([index, degrees[index], symbol.theta, symbol.mean_x, symbol.mean_p,
                                     float(x), float(p)])
                tag = f"N{count}_nph{_photon_tag(n_ph)}"
                writer.write_csv(f"encode_{tag}.csv", ENCODE_COLUMNS, rows)
                if visualizer is not None:
                    writer.track(visualizer.plot_phase_space(
                        clouds, f"N = {count}, n_ph = {n_ph:g}", f"encode_{tag}.png"))
        return EXIT_OK

    def _run_ser(self, writer: ArtifactWriter) -> int:
        mc = self.config.mc
        n_trials = self.n_override or mc.n_trials
        constellation = self.config.drive.constellation()
        results = []
        for count in self.config.geometry.element_counts:
            design = self.config.design(N=count)
            for n_ph in self.config.state.photon_numbers:
                alpha = CoherentState.from_photon_number(n_ph).alpha
                symbols = const.encode_constellation(constellation, alpha, design)
                estimate = const.estimate_ser_for_symbols(symbols, n_trials, mc.seed, workers=mc.workers)
                entry = {"N": count, "n_ph": n_ph, **estimate.as_dict(),
                         "union_bound": const.union_bound(symbols)}
                if len(symbols) > 1:
                    d_min, pair = const.min_distance(symbols)
                    entry.update({"d_min": d_min, "d_min_pair": list(pair)})
                results.append(entry)
        writer.write_json("ser.json", {"results": results})
        return EXIT_OK


def run_subcommand(name: str, config: ScenarioConfig, out_dir: Path, plot: bool = False,
                   n_override: int = None) -> int:
    """Exit status 0 on success, 2 on validation failure, 3 on numerical-tolerance failure."""
    return ScenarioReporter(config, out_dir, plot=plot, n_override=n_override).run(name)
