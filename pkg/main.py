#!/usr/bin/env python3
"""
平面微線圈磁場與驅動計算工具主程序

功能：
1. 線圈中心磁場與軸上磁場（圓形 / 方形）
2. Biot-Savart 數值驗證：側向分布、感測器平均磁場
3. 最大電流、焦耳損耗與磁電效率，匝數掃描
4. 六種封裝情境的磁場表與設計搜尋

使用方法：
python main.py --help                                          # 查看幫助
python main.py center --coil data/reference_coil.json --current 175mA
python main.py scenario-table --coil data/reference_coil.json
python main.py oracle-check --coil data/reference_coil.json
"""

import argparse
import difflib
import logging
import os
import sys
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd
from pydantic import ValidationError

# 添加項目根目錄到Python路徑
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from config import (
    COIL_OUTER_RADIUS_UM,
    DEFAULT_FILAMENTS_PER_TRACK,
    DEFAULT_SEGMENTS_PER_TURN,
    DEFAULT_SUBSTRATE,
    FAMILY_INNER_RADIUS_UM,
    LOG_FILE,
    LOG_LEVEL,
    ORACLE_ANNULUS_FILAMENTS,
    REFERENCE_THICKNESS_UM,
    REFERENCE_TURNS,
    SENSOR_WINDOW_UM,
)
from clients.input_files import InputFilesClient
from clients.output_writer import OutputFormat, OutputWriter
from models.errors import MicrocoilError, QuantityError
from models.geometry import CoilGeometry, CoilShape, LengthMethod
from models.units import QuantityKind, parse_quantity, um_to_m
from services.analytic_field import center_field, center_field_model, on_axis_field_array, on_axis_profile, shape_twin
from services.biot_savart import DiscretizationSpec, lateral_profile, sensor_averaged_field
from services.design_search import Objective, family_search, grid_search
from services.drive_power import (
    MaterialProps,
    builtin_substrates,
    drive_report,
    field_linearity,
    resolve_substrate,
    turns_sweep,
)
from services.oracle_check import run_oracle_check
from services.scenarios import render_scenario_table, scenario_frame, scenario_table

logger = logging.getLogger(__name__)

COMMANDS = (
    "center",
    "axis",
    "lateral",
    "sensor-avg",
    "sweep-turns",
    "drive",
    "scenario-table",
    "optimize",
    "oracle-check",
)


def setup_logging():
    """設置日誌（數據走 stdout，日誌走 stderr）"""
    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if LOG_FILE:
        log_dir = os.path.dirname(LOG_FILE)
        if log_dir:
            os.makedirs(log_dir, exist_ok=True)
        handlers.append(logging.FileHandler(LOG_FILE, encoding='utf-8'))

    logging.basicConfig(
        level=getattr(logging, LOG_LEVEL.upper(), logging.INFO),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=handlers,
    )


# ---- 參數型別 ----

def _quantity_type(kind: QuantityKind, allow_negative: bool = False) -> Callable[[str], float]:
    def parse(text: str) -> float:
        try:
            return parse_quantity(text, kind, allow_negative)
        except QuantityError as e:
            raise argparse.ArgumentTypeError(str(e))

    parse.__name__ = kind.value
    return parse


length_type = _quantity_type(QuantityKind.LENGTH)
offset_type = _quantity_type(QuantityKind.LENGTH, allow_negative=True)
current_type = _quantity_type(QuantityKind.CURRENT)


def length_list_type(text: str) -> List[float]:
    return [length_type(item) for item in text.split(",") if item.strip()]


def turns_list_type(text: str) -> List[int]:
    """'5,10,40' 或範圍 '5-40'"""
    turns: List[int] = []
    try:
        for item in text.split(","):
            item = item.strip()
            if not item:
                continue
            if "-" in item:
                low, high = (int(part) for part in item.split("-", 1))
                turns.extend(range(low, high + 1))
            else:
                turns.append(int(item))
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid turn list: {text!r}")
    if not turns or min(turns) < 1:
        raise argparse.ArgumentTypeError(f"turn counts must be positive integers: {text!r}")
    return turns


def positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1: {text!r}")
    return value


class SuggestingArgumentParser(argparse.ArgumentParser):
    """argparse 錯誤訊息附加 did-you-mean 建議"""

    def error(self, message: str):
        suggestion = self._suggest(message)
        if suggestion:
            message = f"{message} (did you mean {suggestion!r}?)"
        super().error(message)

    def _suggest(self, message: str) -> Optional[str]:
        if message.startswith("argument command: invalid choice") and "'" in message:
            matches = difflib.get_close_matches(message.split("'")[1], COMMANDS, n=1)
            return matches[0] if matches else None
        if message.startswith("unrecognized arguments:"):
            word = message.split(":", 1)[1].split()[0].split("=")[0]
            matches = difflib.get_close_matches(word, self._known_options(), n=1)
            return matches[0] if matches else None
        return None

    def _known_options(self) -> List[str]:
        known = []
        for action in self._actions:
            known.extend(action.option_strings)
            choices = getattr(action, "choices", None)
            if not isinstance(choices, dict):
                continue
            for parser in choices.values():
                if isinstance(parser, argparse.ArgumentParser):
                    known.extend(option for sub_action in parser._actions for option in sub_action.option_strings)
        return known


# ---- 子命令 ----

def _writer(args) -> OutputWriter:
    return OutputWriter(OutputFormat(args.format))


def _spec(args) -> DiscretizationSpec:
    return DiscretizationSpec(segments_per_turn=args.segments, filaments_per_track_width=args.filaments)


def _short(value: float) -> str:
    return f"{value:.3g}".replace("e+0", "e").replace("e+", "e").replace("e-0", "e-")


def _input_files() -> InputFilesClient:
    return InputFilesClient()


def _substrate_profiles(args):
    return _input_files().load_substrates(getattr(args, "substrates_file", None))


def cmd_center(args) -> int:
    coil = _input_files().load_coil(args.coil)
    h = center_field(coil, args.current)
    model = center_field_model(coil)

    if args.format == OutputFormat.TEXT.value:
        print(f"H_center ≈ {_short(h)} A/m")
        print(f"model: {model}")
        return 0

    frame = pd.DataFrame([{"current_A": args.current, "H_center_A_per_m": h}])
    _writer(args).write(frame, sys.stdout, {"model": model, "coil": coil.to_json_dict()})
    return 0


def cmd_axis(args) -> int:
    coil = _input_files().load_coil(args.coil)
    if not args.both_shapes:
        profile = on_axis_profile(coil, args.current, args.d_from, args.d_to, args.samples)
        _writer(args).write(profile.to_frame(), sys.stdout, profile.metadata())
        return 0

    profile = on_axis_profile(shape_twin(coil, CoilShape.ROUND), args.current, args.d_from, args.d_to, args.samples)
    distances = [sample.d for sample in profile.samples]
    frame = pd.DataFrame(
        {
            "d_m": distances,
            "H_round_A_per_m": profile.values,
            "H_square_A_per_m": on_axis_field_array(shape_twin(coil, CoilShape.SQUARE), args.current, distances),
        }
    )
    frame["round_over_square"] = frame["H_round_A_per_m"] / frame["H_square_A_per_m"]
    _writer(args).write(frame, sys.stdout, {"coil": coil.to_json_dict(), "current_A": args.current})
    return 0


def cmd_lateral(args) -> int:
    coil = _input_files().load_coil(args.coil)
    spec = _spec(args)
    frames = []
    metadata: Dict[str, object] = {"model": "biot_savart", "coil": coil.to_json_dict(), "current_A": args.current}
    for d in sorted(set(args.distance)):
        profile = lateral_profile(coil, args.current, d, args.x_from, args.x_to, args.samples, spec)
        frames.append(profile.to_frame(include_normalized=True))
        metadata[f"reference_H_A_per_m@d={d:g}"] = profile.reference_h
        if profile.notes:
            metadata[f"notes@d={d:g}"] = list(profile.notes)
    _writer(args).write(pd.concat(frames, ignore_index=True), sys.stdout, metadata)
    return 0


def cmd_sensor_avg(args) -> int:
    coil = _input_files().load_coil(args.coil)
    spec = _spec(args)
    if args.distance is not None:
        distances = [args.distance]
    else:
        distances = list(np.linspace(args.d_from, args.d_to, args.points))

    def averaged(target: CoilGeometry) -> List[float]:
        return [
            sensor_averaged_field(target, args.current, d, args.window, spec, centered=args.centered)
            for d in distances
        ]

    if args.both_shapes:
        frame = pd.DataFrame(
            {
                "d_m": distances,
                "H_round_A_per_m": averaged(shape_twin(coil, CoilShape.ROUND)),
                "H_square_A_per_m": averaged(shape_twin(coil, CoilShape.SQUARE)),
            }
        )
    else:
        frame = pd.DataFrame(
            {
                "d_m": distances,
                "H_avg_A_per_m": averaged(coil),
                "H_axis_A_per_m": on_axis_field_array(coil, args.current, distances),
            }
        )
    metadata = {
        "model": "biot_savart_sensor_average",
        "coil": coil.to_json_dict(),
        "current_A": args.current,
        "window_length_m": args.window,
        "centered": args.centered,
    }
    _writer(args).write(frame, sys.stdout, metadata)
    return 0


def _sweep_template(args) -> CoilGeometry:
    inner_radius = args.inner_radius
    if args.coil:
        coil = _input_files().load_coil(args.coil)
        thickness = args.thickness or coil.track_thickness
        return coil.model_copy(update={"track_thickness": thickness})

    outer_radius = um_to_m(COIL_OUTER_RADIUS_UM)
    return CoilGeometry(
        shape=CoilShape.ROUND,
        turns=1,
        outer_radius=outer_radius,
        track_width=outer_radius - inner_radius,
        track_spacing=0.0,
        track_thickness=args.thickness or um_to_m(REFERENCE_THICKNESS_UM),
    )


def cmd_sweep_turns(args) -> int:
    substrate = resolve_substrate(args.substrate, _substrate_profiles(args))
    turns = list(range(args.turns_min, args.turns_max + 1, args.turns_step))
    if args.normalize and args.turns_max not in turns:
        turns.append(args.turns_max)

    frame = turns_sweep(
        _sweep_template(args),
        turns,
        substrate,
        MaterialProps(),
        LengthMethod(args.length_method),
        normalize=args.normalize,
        inner_radius=args.inner_radius,
        normalize_to=args.turns_max,
    )
    metadata: Dict[str, object] = {
        "substrate": substrate.name,
        "length_method": args.length_method,
        "inner_radius_m": args.inner_radius,
    }
    if len(frame) >= 3:
        fit = field_linearity(frame)
        metadata["H_center_per_A_vs_N_r_squared"] = fit["r_squared"]
        metadata["H_center_per_A_slope"] = fit["slope"]
    _writer(args).write(frame, sys.stdout, metadata)
    return 0


def cmd_drive(args) -> int:
    coil = _input_files().load_coil(args.coil)
    extra = _substrate_profiles(args)
    if args.substrate == "all":
        profiles = builtin_substrates()
        profiles.update({profile.name: profile for profile in extra})
        substrates = [profiles[name] for name in sorted(profiles)]
    else:
        substrates = [resolve_substrate(args.substrate, extra)]

    material = MaterialProps()
    frame = pd.concat(
        [drive_report(coil, substrate, material, LengthMethod(args.length_method)).to_frame()
         for substrate in substrates],
        ignore_index=True,
    )
    metadata = {
        "coil": coil.to_json_dict(),
        "length_method": args.length_method,
        "center_model": center_field_model(coil),
    }
    _writer(args).write(frame, sys.stdout, metadata)
    return 0


def cmd_scenario_table(args) -> int:
    coil = _input_files().load_coil(args.coil)
    results = scenario_table(coil)
    if args.format == OutputFormat.TEXT.value:
        print(render_scenario_table(results))
        return 0
    metadata: Dict[str, object] = {"coil": coil.to_json_dict()}
    notes = sorted({result.note for result in results if result.note})
    if notes:
        metadata["notes"] = notes
    _writer(args).write(scenario_frame(results), sys.stdout, metadata)
    return 0


def cmd_optimize(args) -> int:
    constraints = _input_files().load_constraints(args.constraints)
    substrate = resolve_substrate(args.substrate, _substrate_profiles(args))
    turns = args.turns or list(range(constraints.turns_min, constraints.turns_max + 1))
    thicknesses = args.thicknesses or [um_to_m(REFERENCE_THICKNESS_UM)]
    objective = Objective(args.objective)
    length_method = LengthMethod(args.length_method)

    if args.family:
        result = family_search(constraints, objective, substrate, MaterialProps(), turns, thicknesses,
                               inner_radius=args.inner_radius, length_method=length_method,
                               shape=CoilShape(args.shape))
    else:
        result = grid_search(constraints, objective, substrate, MaterialProps(), turns, args.widths,
                             args.spacings, thicknesses, length_method=length_method,
                             shape=CoilShape(args.shape))

    frame = result.to_frame().head(args.top)
    metadata = {
        "objective": objective.value,
        "substrate": substrate.name,
        "evaluated": result.evaluated,
        "infeasible": result.infeasible,
    }
    _writer(args).write(frame, sys.stdout, metadata)
    return 0


def cmd_oracle_check(args) -> int:
    coil = _input_files().load_coil(args.coil)
    report = run_oracle_check(coil, args.annulus_filaments)
    _writer(args).write(report, sys.stdout, {"coil": coil.to_json_dict()})
    if not report["passed"].all():
        failed = ", ".join(report.loc[~report["passed"], "check"])
        logger.error(f"Oracle checks failed: {failed}")
        return 1
    return 0


# ---- 參數解析 ----

def _add_common(parser: argparse.ArgumentParser, coil_required: bool = True):
    parser.add_argument('--coil', required=coil_required, help='線圈 JSON 檔 (長度單位 µm)')
    parser.add_argument('--format', choices=[f.value for f in OutputFormat], default=OutputFormat.TEXT.value,
                        help='輸出格式 (預設 text)')


def _add_discretization(parser: argparse.ArgumentParser):
    parser.add_argument('--segments', type=positive_int, default=DEFAULT_SEGMENTS_PER_TURN,
                        help='圓形線圈每匝多邊形邊數')
    parser.add_argument('--filaments', type=positive_int, default=DEFAULT_FILAMENTS_PER_TRACK,
                        help='每條走線的細絲數')


def _add_drive_options(parser: argparse.ArgumentParser, allow_all: bool = False):
    help_text = '基板名稱' + (' 或 all' if allow_all else '')
    parser.add_argument('--substrate', default=DEFAULT_SUBSTRATE, help=help_text)
    parser.add_argument('--substrates-file', help='額外的基板 JSON 檔')
    parser.add_argument('--length-method', choices=[m.value for m in LengthMethod],
                        default=LengthMethod.CLOSED_FORM.value, help='走線長度公式')


def build_parser() -> argparse.ArgumentParser:
    parser = SuggestingArgumentParser(
        prog='main.py',
        description='平面微線圈磁場與驅動計算工具',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
使用範例:
  python main.py center --coil data/reference_coil.json --current 175mA
  python main.py axis --coil data/reference_coil.json --current 300mA --from 0 --to 1mm --samples 101 --format csv
  python main.py lateral --coil data/reference_coil.json --current 300mA --distance 2mm --distance 3mm --from=-1mm --to 1mm
  python main.py sweep-turns --normalize --format csv
  python main.py scenario-table --coil data/reference_coil.json
  python main.py optimize --family --objective max_field_per_ampere
  python main.py oracle-check --coil data/reference_coil.json
        """
    )
    subparsers = parser.add_subparsers(dest='command', metavar='command', parser_class=SuggestingArgumentParser)
    subparsers.required = True

    p = subparsers.add_parser('center', help='線圈中心磁場')
    _add_common(p)
    p.add_argument('--current', type=current_type, required=True, help='電流, 例如 175mA')

    p = subparsers.add_parser('axis', help='軸上磁場分布')
    _add_common(p)
    p.add_argument('--current', type=current_type, required=True)
    p.add_argument('--from', dest='d_from', type=length_type, default=0.0)
    p.add_argument('--to', dest='d_to', type=length_type, required=True)
    p.add_argument('--samples', type=positive_int, default=101)
    p.add_argument('--both-shapes', action='store_true', help='同時輸出圓形與方形')

    p = subparsers.add_parser('lateral', help='側向磁場分布 (Biot-Savart)')
    _add_common(p)
    _add_discretization(p)
    p.add_argument('--current', type=current_type, required=True)
    p.add_argument('--distance', type=length_type, action='append', required=True, help='可重複')
    p.add_argument('--from', dest='x_from', type=offset_type, required=True, help='可為負值, 例如 --from=-1mm')
    p.add_argument('--to', dest='x_to', type=offset_type, required=True)
    p.add_argument('--samples', type=positive_int, default=101)

    p = subparsers.add_parser('sensor-avg', help='感測器長度平均磁場')
    _add_common(p)
    _add_discretization(p)
    p.add_argument('--current', type=current_type, required=True)
    p.add_argument('--distance', type=length_type)
    p.add_argument('--from', dest='d_from', type=length_type, default=0.0)
    p.add_argument('--to', dest='d_to', type=length_type)
    p.add_argument('--points', type=positive_int, default=21)
    p.add_argument('--window', type=length_type, default=um_to_m(SENSOR_WINDOW_UM), help='感測器主動區長度')
    p.add_argument('--centered', action='store_true', help='感測器以 d 為中心')
    p.add_argument('--both-shapes', action='store_true')

    p = subparsers.add_parser('sweep-turns', help='匝數掃描 (R_min, R_max 固定, w = s)')
    _add_common(p, coil_required=False)
    _add_drive_options(p)
    p.add_argument('--turns-min', type=positive_int, default=5)
    p.add_argument('--turns-max', type=positive_int, default=REFERENCE_TURNS)
    p.add_argument('--turns-step', type=positive_int, default=5)
    p.add_argument('--normalize', action='store_true', help='以 --turns-max 的結果歸一化')
    p.add_argument('--inner-radius', type=length_type, default=um_to_m(FAMILY_INNER_RADIUS_UM))
    p.add_argument('--thickness', type=length_type)

    p = subparsers.add_parser('drive', help='最大電流、焦耳損耗與效率')
    _add_common(p)
    _add_drive_options(p, allow_all=True)

    p = subparsers.add_parser('scenario-table', help="六種封裝情境的磁場表")
    _add_common(p)

    p = subparsers.add_parser('optimize', help='設計搜尋')
    _add_common(p, coil_required=False)
    _add_drive_options(p)
    p.add_argument('--objective', choices=[o.value for o in Objective], default=Objective.MAX_MEMF.value)
    p.add_argument('--family', action='store_true', help='只搜尋 w = s 的線圈族')
    p.add_argument('--shape', choices=[s.value for s in CoilShape], default=CoilShape.ROUND.value)
    p.add_argument('--turns', type=turns_list_type, help="例如 '5,10,40' 或 '1-40'")
    p.add_argument('--widths', type=length_list_type, help="例如 '5um,10um'")
    p.add_argument('--spacings', type=length_list_type)
    p.add_argument('--thicknesses', type=length_list_type)
    p.add_argument('--inner-radius', type=length_type, default=um_to_m(FAMILY_INNER_RADIUS_UM))
    p.add_argument('--constraints', help='製程限制 JSON 檔')
    p.add_argument('--top', type=positive_int, default=10)

    p = subparsers.add_parser('oracle-check', help='解析公式與 Biot-Savart 的一致性檢查')
    _add_common(p)
    p.add_argument('--annulus-filaments', type=positive_int, default=ORACLE_ANNULUS_FILAMENTS)

    return parser


def usage_problem(args: argparse.Namespace) -> Optional[str]:
    """參數組合錯誤 (結束代碼 2)，argparse 本身檢查不到的部分"""
    command = args.command
    if command == "axis" and not args.d_from < args.d_to:
        return f"--from must be below --to ({args.d_from:g} m >= {args.d_to:g} m)"
    if command == "lateral" and not args.x_from < args.x_to:
        return f"--from must be below --to ({args.x_from:g} m >= {args.x_to:g} m)"
    if command == "sensor-avg" and args.distance is None:
        if args.d_to is None:
            return "needs --distance or a --to range end"
        if not args.d_from < args.d_to:
            return f"--from must be below --to ({args.d_from:g} m >= {args.d_to:g} m)"
    if command == "sweep-turns" and args.turns_min > args.turns_max:
        return f"--turns-min {args.turns_min} exceeds --turns-max {args.turns_max}"
    if command == "optimize" and not args.family and not (args.widths and args.spacings):
        return "grid search needs --widths and --spacings (or use --family)"
    return None


HANDLERS: Dict[str, Callable[[argparse.Namespace], int]] = {
    "center": cmd_center,
    "axis": cmd_axis,
    "lateral": cmd_lateral,
    "sensor-avg": cmd_sensor_avg,
    "sweep-turns": cmd_sweep_turns,
    "drive": cmd_drive,
    "scenario-table": cmd_scenario_table,
    "optimize": cmd_optimize,
    "oracle-check": cmd_oracle_check,
}


def run(argv: Optional[Sequence[str]] = None) -> int:
    """
    解析參數並執行子命令

    Returns:
        0 成功, 1 領域錯誤 (幾何不成立、奇異點、檔案錯誤), 2 用法錯誤
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        problem = usage_problem(args)
        if problem:
            parser.error(f"{args.command}: {problem}")
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 0

    try:
        return HANDLERS[args.command](args)
    except QuantityError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (MicrocoilError, ValidationError, ValueError, OSError) as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return 1


def main():
    """主函數"""
    setup_logging()
    try:
        return run()
    except KeyboardInterrupt:
        logging.getLogger(__name__).info("Program interrupted by user")
        return 130


if __name__ == '__main__':
    sys.exit(main())
