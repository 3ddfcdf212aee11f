import numpy as np
import pytest

BUDGET_HEADER = (
    "pair_id,direction,t_proc_hub_us,t_air_us,t_proc_terminal_us,"
    "r_proc_hub_mbps,r_air_mbps,r_proc_terminal_mbps\n"
)
TRACE_HEADER = (
    "user_id,cell_id,bits_delivered,sent_packets,delivered_packets,"
    "delivered_in_deadline,active_time_s,energy_j\n"
)


@pytest.fixture
def inputs(tmp_path):
    """One input file per CLI subcommand that reads files."""
    tie = tmp_path / "tie.csv"
    t = np.arange(30 * 150 + 1) / 30
    x = 5 * np.sin(2 * np.pi * t / 37)
    tie.write_text("t_seconds,tie_ns\n" + "".join(f"{a!r},{b!r}\n" for a, b in zip(t.tolist(), x.tolist())))

    budget = tmp_path / "budget.csv"
    budget.write_text(
        BUDGET_HEADER
        + "T1,DS,300,400,300,3000,1500,2000\n"
        + "T2,DS,250,400,300,3000,1500,2000\n"
        + "T1,US,300,400,300,2500,1200,1500\n"
        + "T2,US,300,350,300,2500,1200,1500\n"
    )

    trace = tmp_path / "trace.csv"
    trace.write_text(
        TRACE_HEADER
        + "u1,c1,5000000,100,95,95,1,0.1\n"
        + "u2,c1,6000000,100,95,95,1,0.1\n"
    )

    values = tmp_path / "values.csv"
    values.write_text("snr\n4\n4\n4\n4\n")
    return {"tie": tie, "budget": budget, "trace": trace, "values": values, "dir": tmp_path}


ACCEPTANCE_RESULTS: dict[int, tuple[str, str, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_RESULTS):
        verdict, title, detail = ACCEPTANCE_RESULTS[number]
        line = f"[{verdict}] {number:2d}. {title}"
        terminalreporter.write_line(line + (f" -- {detail}" if detail else ""))
