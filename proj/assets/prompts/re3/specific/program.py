    def story(self):
        self.the_story_is_set_in_the_present_day_and_takes_place_in_the_united_states()
        self.joan_westfall_is_a_woman_who_has_died_in_a_car_accident_she_is_a_kind_and_sympathetic_person_who_is_eager_to_help_the_people_she_left_behind()
        self.brent_westfall_is_joan_s_husband_he_is_a_kind_and_loving_man_who_is_struggling_to_cope_with_his_wife_s_death()
        self.jason_westfall_is_joan_s_son_he_is_a_young_boy_who_is_struggling_to_understand_his_mother_s_death()
        self.jason_westfall_sits_on_the_floor_looking_at_the_empty_box_that_used_to_hold_his_sister_in_law_s_belongings()
        self.his_gaze_is_unfocused_his_dark_blue_eyes_brimming_with_tears()
        self.he_cries_for_hours_eventually_falling_asleep_from_exhaustion()
        self.when_he_wakes_up_he_feels_dazed_and_ill()
        self.joan_died_in_a_car_accident_on_a_rainy_day_several_weeks_ago()
        self.jason_has_been_carrying_on_with_life_ever_since_as_best_he_can_manage_but_he_still_doesn_t_really_know_how_to_cope_with_joan_s_death()

    def the_story_is_set_in_the_present_day_and_takes_place_in_the_united_states(self):
        pass

    def joan_westfall_is_a_woman_who_has_died_in_a_car_accident_she_is_a_kind_and_sympathetic_person_who_is_eager_to_help_the_people_she_left_behind(self):
        self.Joan_Westfall.gender.append('female')

    def brent_westfall_is_joan_s_husband_he_is_a_kind_and_loving_man_who_is_struggling_to_cope_with_his_wife_s_death(self):
        self.Joan_Westfall.relations['husband'] = 'Brent_Westfall'
        self.Brent_Westfall.relations['wife'] = 'Joan_Westfall'
        self.Brent_Westfall.gender.append('male')

    def jason_westfall_is_joan_s_son_he_is_a_young_boy_who_is_struggling_to_understand_his_mother_s_death(self):
        self.Joan_Westfall.relations['son'] = 'Jason_Westfall'
        self.Jason_Westfall.relations['mother'] = 'Joan_Westfall'
        self.Jason_Westfall.age.append('young')
        self.Jason_Westfall.gender.append('male')

    def jason_westfall_sits_on_the_floor_looking_at_the_empty_box_that_used_to_hold_his_sister_in_law_s_belongings(self):
        self.Jason_Westfall.relations['sister_in_laws'] = 'Joan_Westfall'

    def his_gaze_is_unfocused_his_dark_blue_eyes_brimming_with_tears(self):
        self.Jason_Westfall.appearance.append("dark blue eyes")

    def he_cries_for_hours_eventually_falling_asleep_from_exhaustion(self):
        pass

    def when_he_wakes_up_he_feels_dazed_and_ill(self):
        pass

    def joan_died_in_a_car_accident_on_a_rainy_day_several_weeks_ago(self):
        pass

    def jason_has_been_carrying_on_with_life_ever_since_as_best_he_can_manage_but_he_still_doesn_t_really_know_how_to_cope_with_joan_s_death(self):
        pass
