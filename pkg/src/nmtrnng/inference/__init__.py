from .decoder import BeamResult, Hypothesis, JointResult, Translator, sweep_beam_widths

__all__ = ['BeamResult', 'Hypothesis', 'JointResult', 'Translator', 'sweep_beam_widths']
