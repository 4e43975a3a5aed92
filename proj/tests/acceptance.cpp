int acceptance_placeholder_main_marker; int main(){return 0;}
