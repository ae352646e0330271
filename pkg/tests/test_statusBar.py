import io
from quantord.statusBar import StatusBar, formatProgress


def test_format_progress_phases():
    assert formatProgress(100, 400, 200, width=8) == "[##......] sweep 100/400 (burn-in)"
    assert formatProgress(400, 400, 200, width=8) == "[########] sweep 400/400 (sampling)"


def test_disabled_bar_prints_plain_lines():
    stream = io.StringIO()
    bar = StatusBar(enabled=False, stream=stream)
    bar.start("p = 0.5")
    bar.update(10, 100, 20)
    bar.printAbove("fitted")
    bar.stop("finished")
    assert stream.getvalue() == "fitted\nfinished\n"


def test_non_tty_stream_disables_bar():
    assert not StatusBar(stream=io.StringIO()).enabled


def test_render_line_includes_label_and_gauge():
    bar = StatusBar(enabled=False, stream=io.StringIO())
    bar.start("p = 0.75")
    bar.update(50, 100, 10)
    line = bar.renderLine("*")
    assert "p = 0.75" in line and "sweep 50/100 (sampling)" in line
