"""GUI agent toolkit: action space, annotated text, episode protocol, synthesis and evaluation."""
