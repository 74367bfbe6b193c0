"""Small reference nets.

Each builder returns ``(net, start)``.  They double as test fixtures and
as documentation of the modelling API.
"""

from __future__ import annotations

from .core import Net, State, new_net


def water() -> tuple[Net, State]:
    """2 H2 + O2 -> 2 H2O as a single AND transition."""
    net = new_net(["H2", "O2", "H2O"], ["•"])
    net.add_and("T0", inputs=[("H2", 2), ("O2", 1)], outputs=[("H2O", 2)])
    return net, net.marking({"H2": 2, "O2": 1})


def colored_choice() -> tuple[Net, State]:
    """P0 feeds T0 (needs blue) and T1 (needs red); one blue token at P0."""
    net = new_net(["P0", "P1", "P2"], ["blue", "red"])
    net.add_and("T0", inputs=[("P0", "blue", 1)], outputs=[("P1", "blue", 1)])
    net.add_and("T1", inputs=[("P0", "red", 1)], outputs=[("P2", "red", 1)])
    return net, net.marking({("P0", "blue"): 1})


def shared_input() -> tuple[Net, State]:
    """T0 and T1 both consume from P1, so they must share a work cluster."""
    net = new_net(["P0", "P1", "P2", "P3", "P4"], ["•"])
    net.add_and("T0", inputs=["P0", "P1"], outputs=["P3"])
    net.add_and("T1", inputs=["P1", "P2"], outputs=["P4"])
    return net, net.marking({"P0": 1, "P1": 1})


def shared_input_cycle() -> tuple[Net, State]:
    """Like :func:`shared_input`, but tokens circulate forever (no deadlock)."""
    net = new_net(["P0", "P1", "P2"], ["•"])
    net.add_and("T0", inputs=["P0", "P1"], outputs=["P1", "P2"])
    net.add_and("T1", inputs=["P1", "P2"], outputs=["P0", "P1"])
    return net, net.marking({"P0": 1, "P1": 1})


def disjoint() -> tuple[Net, State]:
    net = new_net(["P0", "P1", "P2", "P3"], ["•"])
    net.add_and("T0", inputs=["P0"], outputs=["P2"])
    net.add_and("T1", inputs=["P1"], outputs=["P3"])
    return net, net.marking({"P0": 1, "P1": 1})


def self_replenishing() -> tuple[Net, State]:
    """T0 puts its token back and adds one more to P1 on every firing (unbounded)."""
    net = new_net(["P0", "P1"], ["•"])
    net.add_and("T0", inputs=["P0"], outputs=["P0", "P1"])
    return net, net.marking({"P0": 1})


def unreachable_loop() -> tuple[Net, State]:
    """The net has a cycle (P2 <-> P3) that no token ever reaches."""
    net = new_net(["P0", "P1", "P2", "P3"], ["•"])
    net.add_and("T0", inputs=["P0"], outputs=["P1"])
    net.add_and("T1", inputs=["P2"], outputs=["P3"])
    net.add_and("T2", inputs=["P3"], outputs=["P2"])
    return net, net.marking({"P0": 1})


def empty_marking() -> tuple[Net, State]:
    """The water net with no tokens: nothing is ever enabled."""
    net, _ = water()
    return net, State()


# Voice-command pipeline with microphone tuning feedback.
#
# Audio, text and keyword buffers each hold one item, so the recorder (T0),
# splitter (T1), parser (T2) and executor (T4) advance in lock step.  Every
# split spends a tuning allowance; the tuner (T3) turns it into a request
# that the microphone (XOR T0, second pair) applies, and T5 returns the
# allowance.  Five allowances bound the outstanding tuning work.
PIPELINE_PLACES = [
    "P0_audio_slot",        # recorder may capture
    "P1_audio",             # captured audio
    "P2_text",              # per-voice text streams
    "P3_text_slot",
    "P4_keywords",
    "P5_keyword_slot",
    "P6_executor",          # command executor resource
    "P7_voice_profile",     # voice to tune for
    "P8_tuning_requests",   # outstanding-request allowance
    "P9_tune_request",      # request queued at the microphone
    "P10_tuned",            # microphone retuned
]


def voice_pipeline() -> tuple[Net, State]:
    net = new_net(PIPELINE_PLACES, ["•"])
    p = PIPELINE_PLACES
    net.add_xor("T0", pairs=[(p[9], p[10]), (p[0], p[1])])
    net.add_and("T1", inputs=[p[1], p[3], p[8]], outputs=[p[0], p[2], p[7]])
    net.add_and("T2", inputs=[p[2], p[5]], outputs=[p[3], p[4]])
    net.add_and("T3", inputs=[p[7]], outputs=[p[9]])
    net.add_and("T4", inputs=[p[4], p[6]], outputs=[p[5], p[6]])
    net.add_and("T5", inputs=[p[10]], outputs=[p[8]])
    start = net.marking({p[0]: 1, p[3]: 1, p[5]: 1, p[6]: 1, p[8]: 5})
    return net, start


ALL = {
    "water": water,
    "colored_choice": colored_choice,
    "shared_input": shared_input,
    "shared_input_cycle": shared_input_cycle,
    "disjoint": disjoint,
    "self_replenishing": self_replenishing,
    "unreachable_loop": unreachable_loop,
    "empty_marking": empty_marking,
    "voice_pipeline": voice_pipeline,
}
