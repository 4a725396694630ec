"""Logging configuration for the wayfinding simulator."""

import logging
import sys
from pathlib import Path
from typing import Optional

try:
    from loguru import logger as loguru_logger
    LOGURU_AVAILABLE = True
except ImportError:
    LOGURU_AVAILABLE = False

try:
    import colorama
    colorama.init()  # Initialize colorama for Windows compatibility
except ImportError:
    pass


class InterceptHandler(logging.Handler):
    """Forward standard-library log records into loguru.

    Library modules log through ``logging.getLogger(__name__)``; this handler
    makes those records show up in the loguru sinks with their original
    module, function and line.
    """

    def emit(self, record: logging.LogRecord) -> None:
        try:
            level = loguru_logger.level(record.levelname).name
        except ValueError:
            level = record.levelno

        frame, depth = logging.currentframe(), 2
        while frame is not None and frame.f_code.co_filename == logging.__file__:
            frame = frame.f_back
            depth += 1

        loguru_logger.opt(depth=depth, exception=record.exc_info).log(level, record.getMessage())


def setup_enhanced_logger(
    name: str = "evac_wayfinding",
    level: str = "INFO",
    log_file: Optional[str] = None,
    use_colors: bool = True
) -> "loguru_logger":
    """Set up and configure an enhanced logger using loguru.

    Args:
        name: Logger name
        level: Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        log_file: Optional log file path
        use_colors: Whether to use colored output

    Returns:
        Configured loguru logger
    """
    if not LOGURU_AVAILABLE:
        return setup_basic_logger(name, getattr(logging, level.upper(), logging.INFO))

    loguru_logger.remove()

    console_format = (
        "<green>{time:YYYY-MM-DD HH:mm:ss}</green> | "
        "<level>{level: <8}</level> | "
        "<cyan>{name}</cyan>:<cyan>{function}</cyan>:<cyan>{line}</cyan> | "
        "<level>{message}</level>"
    )

    # stdout is reserved for the CLI one-line summaries
    loguru_logger.add(
        sys.stderr,
        format=console_format,
        level=level.upper(),
        colorize=use_colors,
        backtrace=True,
        diagnose=False,
    )

    if log_file:
        log_path = Path(log_file)
        log_path.parent.mkdir(parents=True, exist_ok=True)

        file_format = (
            "{time:YYYY-MM-DD HH:mm:ss} | "
            "{level: <8} | "
            "{name}:{function}:{line} | "
            "{message}"
        )

        loguru_logger.add(
            log_file,
            format=file_format,
            level=level.upper(),
            rotation="10 MB",
            retention="7 days",
            compression="zip",
            backtrace=True,
            diagnose=False,
        )

    # Route module loggers (logging.getLogger(__name__)) through loguru
    logging.basicConfig(handlers=[InterceptHandler()], level=0, force=True)

    return loguru_logger


def setup_basic_logger(name: str = "evac_wayfinding", level: int = logging.INFO) -> logging.Logger:
    """Fallback basic logger setup when loguru is not available.

    Args:
        name: Logger name
        level: Logging level

    Returns:
        Configured basic logger
    """
    logger = logging.getLogger(name)
    logger.setLevel(level)

    if not logger.handlers:
        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setLevel(level)
        console_handler.setFormatter(logging.Formatter(
            "%(asctime)s | %(levelname)s | %(name)s:%(funcName)s:%(lineno)d | %(message)s",
            datefmt="%Y-%m-%d %H:%M:%S"
        ))
        logger.addHandler(console_handler)

    return logger


def setup_logger(name: str = "evac_wayfinding", level: str = "INFO", **kwargs) -> "loguru_logger":
    """Main logger setup function.

    Args:
        name: Logger name
        level: Logging level
        **kwargs: Additional arguments for the enhanced logger

    Returns:
        Configured logger (loguru if available, otherwise basic logging)
    """
    return setup_enhanced_logger(name, level, **kwargs)


def _success(logger, message: str) -> None:
    if hasattr(logger, 'success'):
        logger.success(message)
    else:
        logger.info(message)


def log_run_start(logger, scenario) -> None:
    """Log the key parameters of a scenario about to run."""
    t = scenario.tunables
    logger.info(f"🚀 Starting {scenario.mode} run (seed {scenario.seed})")
    logger.info(f"   🧭 Routes: {scenario.route_count}  |  👥 Agents: {scenario.agents.count}")
    logger.info(f"   🎚️  θ={t.theta}  W={t.memory_window}  λ={t.decay}  β={t.crowd_smoothing}")
    if scenario.disabled_sources:
        logger.info(f"   🚫 Disabled sources: {', '.join(scenario.disabled_sources)}")


def log_run_summary(logger, result) -> None:
    """Log route shares and evacuation time of a finished run."""
    logger.info("=" * 60)
    shares = "  ".join(f"route {route}: {pct:.1f}%" for route, pct in result.route_percent.items())
    _success(logger, f"✨ Run finished: {result.committed_count} committed agent{'s' if result.committed_count != 1 else ''}")
    logger.info(f"   📊 {shares if shares else 'no commitments'}")
    logger.info(f"   ⏱️  Evacuation time: {result.evac_time_s:.1f} s")
    if result.mean_prediction_entropy is not None:
        logger.info(f"   🔮 Mean prediction entropy: {result.mean_prediction_entropy:.4f}")
    if result.uncommitted:
        logger.warning(f"😔 {len(result.uncommitted)} agent(s) never committed: {result.uncommitted}")
    logger.info("=" * 60)


def log_sweep_row(logger, row) -> None:
    """Log one aggregated row of a memory sweep."""
    logger.info(f"🧠 W={row.window}: entropy {row.mean_entropy:.4f} ± {row.std_entropy:.4f} over {row.n_seeds} seed(s)")


def log_preset_row(logger, row) -> None:
    """Log one reference-case comparison row."""
    mark = "✅" if row.majority_match else "❌"
    logger.info(
        f"{mark} Case {row.case} {row.label}: L {row.left_pct:.0f}% R {row.right_pct:.0f}% "
        f"(reported L {row.reported_left_pct:.0f}% R {row.reported_right_pct:.0f}%)"
    )


def log_validation(logger, summary: dict) -> None:
    """Log the outcome of a scenario validation."""
    _success(logger, f"✅ Scenario valid: M={summary['routes']} N={summary['sources']} agents={summary['agents']}")
